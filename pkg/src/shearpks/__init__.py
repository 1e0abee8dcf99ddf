"""Numerical laboratory for shear suppression of chemotactic blow-up.

Three layers:

* :mod:`shearpks.thresholds` -- closed-form estimate constants, rate
  factors, amplitude thresholds, and an audit of the published bounds.
* :mod:`shearpks.spectral`, :mod:`shearpks.physics`,
  :mod:`shearpks.solver` -- shear-adapted pseudo-spectral simulator of the
  advected chemotaxis(-fluid) system in a comoving frame.
* :mod:`shearpks.experiments` -- narrative studies: enhanced-dissipation
  scaling, critical mass, amplitude sweeps, sup-norm margins.

The ``shearpks`` CLI exposes all of it; see the README.
"""

from shearpks.experiments import (
    EIGHT_PI,
    RateFit,
    ScalingRow,
    ScalingStudy,
    SweepPlan,
    SweepResult,
    critical_mass_study,
    decay_rate_fit,
    default_critical_mass_config,
    default_sweep_plan,
    dissipation_scaling_study,
    efold_time,
    gaussian_bump,
    moser_bound_monitor,
    suppression_sweep,
    sweep_plan_from_dict,
)
from shearpks.physics import (
    FluxSet,
    MarginRow,
    SolvabilityError,
    dealias,
    elliptic_margins,
    grad_norms,
    moser_sup_bound,
    nonlinear_fluxes,
    solve_chemoattractant,
    spectral_divergence,
    velocity_divergence_check,
    velocity_from_vorticity,
)
from shearpks.serialize import render_json
from shearpks.solver import (
    RunResult,
    SimConfig,
    SimState,
    cfl_bound,
    config_from_dict,
    detect_blowup,
    linear_propagator,
    load_initial,
    new_state,
    physical_samples,
    remap_shear,
    result_columns,
    run,
    save_run,
    step,
)
from shearpks.spectral import (
    AnisotropicNorm,
    GridSpec,
    SpaceTimeAccumulator,
    SpectralField,
    anisotropic_norm,
    forward_transform,
    ghost_weight,
    ghost_weight_parts,
    instantaneous_pieces,
    inverse_transform,
    load_checkpoint,
    save_checkpoint,
    weight_drift_check,
)
from shearpks.thresholds import (
    AuditReport,
    AuditRow,
    BootstrapSizes,
    ConstantReport,
    InitialNorms,
    ModelCase,
    NormParams,
    ParameterError,
    ThresholdResult,
    audit_reference_chain,
    beta_function,
    bootstrap_sizes,
    bound_constants,
    build_report,
    closing_curve,
    is_reference_point,
    published_threshold,
    rate_factor,
    reference_params,
    solve_amplitude_threshold,
    solve_threshold_detail,
)

__all__ = [
    "AnisotropicNorm",
    "AuditReport",
    "AuditRow",
    "BootstrapSizes",
    "ConstantReport",
    "EIGHT_PI",
    "FluxSet",
    "GridSpec",
    "InitialNorms",
    "MarginRow",
    "ModelCase",
    "NormParams",
    "ParameterError",
    "RateFit",
    "RunResult",
    "ScalingRow",
    "ScalingStudy",
    "SimConfig",
    "SimState",
    "SolvabilityError",
    "SpaceTimeAccumulator",
    "SpectralField",
    "SweepPlan",
    "SweepResult",
    "ThresholdResult",
    "anisotropic_norm",
    "audit_reference_chain",
    "beta_function",
    "bootstrap_sizes",
    "bound_constants",
    "build_report",
    "cfl_bound",
    "closing_curve",
    "config_from_dict",
    "critical_mass_study",
    "dealias",
    "decay_rate_fit",
    "default_critical_mass_config",
    "default_sweep_plan",
    "detect_blowup",
    "dissipation_scaling_study",
    "efold_time",
    "elliptic_margins",
    "forward_transform",
    "gaussian_bump",
    "ghost_weight",
    "ghost_weight_parts",
    "grad_norms",
    "instantaneous_pieces",
    "inverse_transform",
    "is_reference_point",
    "linear_propagator",
    "load_checkpoint",
    "load_initial",
    "moser_bound_monitor",
    "moser_sup_bound",
    "new_state",
    "nonlinear_fluxes",
    "physical_samples",
    "published_threshold",
    "rate_factor",
    "reference_params",
    "remap_shear",
    "render_json",
    "result_columns",
    "run",
    "save_checkpoint",
    "save_run",
    "solve_amplitude_threshold",
    "solve_chemoattractant",
    "solve_threshold_detail",
    "spectral_divergence",
    "step",
    "suppression_sweep",
    "sweep_plan_from_dict",
    "velocity_divergence_check",
    "velocity_from_vorticity",
    "weight_drift_check",
]

__version__ = "0.1.0"

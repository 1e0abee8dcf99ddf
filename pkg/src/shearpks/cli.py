"""Command-line front end over the calculator, the solver and the sweeps.

Subcommands
  constants  closed-form estimate constants, amplitude thresholds, audit
  solve      one simulation from an INI config, written to a run directory
  sweep      amplitude sweep from a JSON plan (the only parallel command)
  oracle     linear run against the exact mode propagator
  norms      static norms of a PKSC checkpoint

Exit codes: 0 success, 2 configuration error, 3 blow-up detected,
4 numerical failure.  Every subcommand is deterministic for fixed inputs
and all floating-point output carries 15 significant digits, so reruns
are byte-identical and safe to hash in regression suites.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
from dataclasses import asdict
from typing import Dict, Optional, Tuple

import numpy as np

from shearpks.experiments import (default_sweep_plan, gaussian_bump,
                                  suppression_sweep, sweep_plan_from_dict)
from shearpks.serialize import render_json
from shearpks.solver import (SimConfig, linear_propagator, load_initial,
                             physical_samples, run, save_run,
                             STATUS_BLOWUP, STATUS_COMPLETED, STATUS_FAILURE)
from shearpks.spectral import (GridSpec, SpectralField, anisotropic_norm,
                               instantaneous_pieces, load_checkpoint)
from shearpks.thresholds import (InitialNorms, ModelCase, NormParams,
                                 audit_reference_chain, build_report,
                                 reference_params)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_FAILURE = 4

_STATUS_EXIT = {STATUS_COMPLETED: EXIT_OK, STATUS_BLOWUP: EXIT_BLOWUP,
                STATUS_FAILURE: EXIT_FAILURE}

_PARAM_FLAGS = ("high_exp", "low_exp", "gain", "weight_span", "theta_lin",
                "theta_quad")
_NORM_FLAGS = ("density", "density_frac", "vorticity", "mass", "sup")


def _emit(text: str) -> None:
    sys.stdout.write(text)


def _params_from_args(args: argparse.Namespace) -> NormParams:
    """Reference point for the requested alpha, overridden flag by flag.

    --published-defaults pins the reference point explicitly; combining it
    with an override is a contradiction and rejected.
    """
    ref = reference_params(args.alpha)
    explicit = {name: getattr(args, name) for name in _PARAM_FLAGS
                if getattr(args, name) is not None}
    if args.published_defaults and explicit:
        raise ValueError("--published-defaults conflicts with --%s"
                         % sorted(explicit)[0].replace("_", "-"))
    merged = {name: explicit.get(name, getattr(ref, name))
              for name in _PARAM_FLAGS}
    return NormParams(**merged)


def _initial_norms_from_args(args: argparse.Namespace) -> Optional[InitialNorms]:
    vals = {name: getattr(args, "norm_" + name) for name in _NORM_FLAGS}
    if all(v is None for v in vals.values()):
        return None
    norms = InitialNorms(**{k: (0.0 if v is None else v)
                            for k, v in vals.items()})
    norms.validate()
    return norms


def cmd_constants(args: argparse.Namespace) -> int:
    if args.print_defaults:
        _emit(render_json({"alpha": args.alpha, "coupled": args.coupled,
                           "mode": args.mode,
                           "params": asdict(reference_params(args.alpha))}))
        return EXIT_OK
    case = ModelCase(alpha=args.alpha, coupled=args.coupled)
    params = _params_from_args(args)
    norms = _initial_norms_from_args(args)
    report = build_report(params, case, norms)
    payload = {
        "case": {"alpha": case.alpha, "coupled": case.coupled},
        "params": asdict(params),
        "mode": args.mode,
        "threshold": (report.threshold_split if args.mode == "split"
                      else report.threshold_sharp),
        "report": report.as_dict(),
    }
    if norms is not None:
        # thresholds are stated at unit bootstrap size; data of size k
        # needs amplitude k^9 times larger
        payload["required_split"] = report.threshold_split * report.size ** 9
        payload["required_sharp"] = report.threshold_sharp * report.size ** 9
    failures = 0
    if args.audit:
        audit = audit_reference_chain()
        failures = len(audit.failures)
        payload["audit"] = {"checks": len(audit.rows), "failures": failures,
                            "rows": audit.as_list()}
    text = render_json(payload)
    if args.out is not None:
        with open(args.out, "w") as fh:
            fh.write(text)
    _emit(text)
    return EXIT_FAILURE if failures else EXIT_OK


# --- solve: INI-configured single run ---

_INI_SCHEMA = {
    "run": {"amplitude", "alpha", "coupled", "dt", "t_end", "remap_threshold",
            "blowup_linf", "blowup_tail", "sample_every", "rescaled",
            "nonlinear", "subtract_mean", "track_modes"},
    "grid": {"nx", "ny", "lx", "ly", "dealias_fraction"},
    "norms": {"high_exp", "low_exp", "gain", "weight_span", "theta_lin",
              "theta_quad"},
    "initial": {"kind", "mass", "sigma", "center_x", "center_y",
                "x_mean_adjust", "formula", "density", "vorticity"},
    "output": {"directory"},
}
_INITIAL_KEYS = {
    "zero": set(),
    "bump": {"mass", "sigma", "center_x", "center_y", "x_mean_adjust"},
    "expression": {"formula"},
    "checkpoint": {"density", "vorticity"},
}
_BOOL_WORDS = {"1": True, "true": True, "yes": True, "on": True,
               "0": False, "false": False, "no": False, "off": False}


def _fval(section: str, data: Dict[str, str], key: str,
          default: Optional[float]) -> Optional[float]:
    text = data.get(key)
    if text is None:
        return default
    try:
        return float(text)
    except ValueError:
        raise ValueError("invalid number for %s.%s: %r" % (section, key, text))


def _ival(section: str, data: Dict[str, str], key: str, default: int) -> int:
    text = data.get(key)
    if text is None:
        return default
    try:
        return int(text)
    except ValueError:
        raise ValueError("invalid integer for %s.%s: %r" % (section, key, text))


def _bval(section: str, data: Dict[str, str], key: str, default: bool) -> bool:
    text = data.get(key)
    if text is None:
        return default
    try:
        return _BOOL_WORDS[text.strip().lower()]
    except KeyError:
        raise ValueError("invalid boolean for %s.%s: %r" % (section, key, text))


def _parse_modes(text: str) -> Tuple[Tuple[int, int], ...]:
    modes = []
    for part in text.split():
        bits = part.split(",")
        try:
            if len(bits) != 2:
                raise ValueError
            modes.append((int(bits[0]), int(bits[1])))
        except ValueError:
            raise ValueError("track_modes entries are k,xi integer pairs, "
                             "got %r" % part)
    return tuple(modes)


def _load_ini(path: str) -> configparser.ConfigParser:
    if not os.path.isfile(path):
        raise ValueError("config file not found: %s" % path)
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ValueError("cannot parse config %s: %s" % (path, exc))
    for section in cp.sections():
        if section not in _INI_SCHEMA:
            raise ValueError("unknown config section %r" % section)
        for key in cp.options(section):
            if key not in _INI_SCHEMA[section]:
                raise ValueError("unknown config key %r in section %r"
                                 % (key, section))
    return cp


def _norms_from_ini(cp: configparser.ConfigParser,
                    alpha: float) -> Optional[NormParams]:
    if not cp.has_section("norms"):
        return None
    data = dict(cp["norms"])
    ref = reference_params(alpha)
    return NormParams(**{name: _fval("norms", data, name, getattr(ref, name))
                         for name in _PARAM_FLAGS})


def _config_from_ini(cp: configparser.ConfigParser) -> SimConfig:
    if not cp.has_section("run"):
        raise ValueError("config needs a [run] section")
    r = dict(cp["run"])
    if "amplitude" not in r:
        raise ValueError("run.amplitude is required")
    g = dict(cp["grid"]) if cp.has_section("grid") else {}
    alpha = _fval("run", r, "alpha", 1.0)
    grid = GridSpec(
        nx=_ival("grid", g, "nx", 128), ny=_ival("grid", g, "ny", 128),
        lx=_fval("grid", g, "lx", 32.0 * math.pi),
        ly=_fval("grid", g, "ly", 32.0 * math.pi),
        dealias_fraction=_fval("grid", g, "dealias_fraction", 2.0 / 3.0))
    return SimConfig(
        amplitude=_fval("run", r, "amplitude", None),
        alpha=alpha,
        coupled=_bval("run", r, "coupled", False),
        grid=grid,
        dt=_fval("run", r, "dt", 1e-2),
        t_end=_fval("run", r, "t_end", 1.0),
        remap_threshold=_fval("run", r, "remap_threshold", 0.5),
        blowup_linf=_fval("run", r, "blowup_linf", math.inf),
        blowup_tail=_fval("run", r, "blowup_tail", 0.1),
        norm_params=_norms_from_ini(cp, alpha),
        sample_every=_ival("run", r, "sample_every", 1),
        rescaled=_bval("run", r, "rescaled", True),
        nonlinear=_bval("run", r, "nonlinear", True),
        subtract_mean=_bval("run", r, "subtract_mean", False),
        track_modes=_parse_modes(r.get("track_modes", "")))


_EXPR_NAMES = {name: getattr(np, name) for name in (
    "sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "sqrt", "log",
    "abs", "hypot", "minimum", "maximum", "where", "pi", "e")}


def _eval_expression(formula: str, grid: GridSpec) -> np.ndarray:
    """Initial samples from a numpy expression in x and y (plus lx, ly and
    the whitelisted functions above; no builtins)."""
    x = (np.arange(grid.nx) * grid.dx)[:, None]
    y = (np.arange(grid.ny) * grid.dy)[None, :]
    names = dict(_EXPR_NAMES, x=x, y=y, lx=grid.lx, ly=grid.ly)
    try:
        vals = eval(compile(formula, "<initial formula>", "eval"),
                    {"__builtins__": {}}, names)
    except Exception as exc:
        raise ValueError("initial formula failed: %s" % exc)
    arr = np.asarray(vals, dtype=np.float64)
    arr = np.ascontiguousarray(np.broadcast_to(arr, (grid.nx, grid.ny)))
    if not np.all(np.isfinite(arr)):
        raise ValueError("initial formula produced non-finite values")
    return arr


def _initial_from_ini(cp: configparser.ConfigParser, config: SimConfig,
                      base: str):
    sec = dict(cp["initial"]) if cp.has_section("initial") else {}
    kind = sec.get("kind", "zero")
    if kind not in _INITIAL_KEYS:
        raise ValueError("unknown initial kind %r (zero, bump, expression, "
                         "checkpoint)" % kind)
    extra = set(sec) - {"kind"} - _INITIAL_KEYS[kind]
    if extra:
        raise ValueError("config key %r is not valid for initial kind %r"
                         % (sorted(extra)[0], kind))
    grid = config.grid
    if kind == "zero":
        return SpectralField.zeros(grid), None
    if kind == "bump":
        if "mass" not in sec:
            raise ValueError("initial.mass is required for kind = bump")
        cx = _fval("initial", sec, "center_x", None)
        cy = _fval("initial", sec, "center_y", None)
        if (cx is None) != (cy is None):
            raise ValueError("center_x and center_y must be given together")
        bump = gaussian_bump(
            grid, _fval("initial", sec, "mass", None),
            center=None if cx is None else (cx, cy),
            sigma=_fval("initial", sec, "sigma", None),
            x_mean_adjust=_bval("initial", sec, "x_mean_adjust", False))
        return bump, None
    if kind == "expression":
        formula = sec.get("formula")
        if formula is None:
            raise ValueError("initial.formula is required for kind = expression")
        samples = _eval_expression(formula, grid)
        return SpectralField.from_physical(samples, grid), None
    dpath = sec.get("density")
    if dpath is None:
        raise ValueError("initial.density is required for kind = checkpoint")
    n = load_initial(os.path.join(base, dpath), grid)
    w = None
    wpath = sec.get("vorticity")
    if wpath is not None:
        if not config.coupled:
            raise ValueError("initial.vorticity given but run.coupled is false")
        w = load_initial(os.path.join(base, wpath), grid)
    return n, w


def _default_ini() -> str:
    cfg = SimConfig(amplitude=1.0)
    g, p = cfg.grid, NormParams()
    lines = [
        "# single-run configuration; run.amplitude is the only required key",
        "[run]",
        "amplitude = 1",
        "alpha = %.15g" % cfg.alpha,
        "coupled = false",
        "dt = %.15g" % cfg.dt,
        "t_end = %.15g" % cfg.t_end,
        "remap_threshold = %.15g" % cfg.remap_threshold,
        "blowup_linf = inf",
        "blowup_tail = %.15g" % cfg.blowup_tail,
        "sample_every = %d" % cfg.sample_every,
        "rescaled = true",
        "nonlinear = true",
        "subtract_mean = false",
        "track_modes =",
        "",
        "[grid]",
        "nx = %d" % g.nx,
        "ny = %d" % g.ny,
        "lx = %.15g" % g.lx,
        "ly = %.15g" % g.ly,
        "dealias_fraction = %.15g" % g.dealias_fraction,
        "",
        "# optional; omitted keys fall back to the reference point for run.alpha",
        "[norms]",
        "high_exp = %.15g" % p.high_exp,
        "low_exp = %.15g" % p.low_exp,
        "gain = %.15g" % p.gain,
        "weight_span = %.15g" % p.weight_span,
        "theta_lin = %.15g" % p.theta_lin,
        "theta_quad = %.15g" % p.theta_quad,
        "",
        "# kinds: zero | bump | expression | checkpoint",
        "#   bump        mass (required), sigma, center_x, center_y, x_mean_adjust",
        "#   expression  formula, a numpy expression in x and y",
        "#   checkpoint  density (PKSC path), vorticity (PKSC path, coupled runs)",
        "[initial]",
        "kind = zero",
        "",
        "# or pass --out on the command line",
        "[output]",
        "directory = runs/example",
    ]
    return "\n".join(lines) + "\n"


def cmd_solve(args: argparse.Namespace) -> int:
    if args.print_defaults:
        _emit(_default_ini())
        return EXIT_OK
    if args.config is None:
        raise ValueError("missing config file (or use --print-defaults)")
    cfg_path = os.path.abspath(args.config)
    cp = _load_ini(cfg_path)
    base = os.path.dirname(cfg_path)
    config = _config_from_ini(cp)
    config.resolved_norm_params().validate(config.alpha)
    init_n, init_w = _initial_from_ini(cp, config, base)
    out_dir = args.out
    if out_dir is None:
        out_dir = dict(cp["output"]).get("directory") \
            if cp.has_section("output") else None
        if out_dir is None:
            raise ValueError("no output directory (set [output] directory "
                             "or pass --out)")
        out_dir = os.path.join(base, out_dir)  # relative to the config file
    result = run(config, init_n, init_w)
    save_run(result, out_dir)
    _emit(render_json(result.summary()))
    return _STATUS_EXIT[result.status]


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.print_defaults:
        _emit(render_json(default_sweep_plan(coupled=args.coupled).to_dict()))
        return EXIT_OK
    if args.plan is None or args.out is None:
        raise ValueError("sweep needs --plan and --out (or --print-defaults)")
    if args.jobs < 1:
        raise ValueError("--jobs must be >= 1")
    with open(args.plan) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError("cannot parse plan %s: %s" % (args.plan, exc))
    try:
        plan = sweep_plan_from_dict(payload)
    except KeyError as exc:
        raise ValueError("plan is missing required key %s" % exc)
    result = suppression_sweep(plan, out_dir=args.out, jobs=args.jobs)
    _emit(render_json(result.as_dict()))
    return EXIT_OK


def _oracle_grid(k: int, xi0: int, t: float) -> GridSpec:
    """Smallest power-of-two box (2 pi square cells) whose dealias band
    holds the probe mode and every label its characteristic visits."""
    nx = 16
    while nx < 4 * abs(k) + 8:
        nx *= 2
    need = abs(xi0) + abs(k) * t
    ny = 32
    while ny < 4.0 * need + 16.0:
        ny *= 2
        if ny > 8192:
            raise ValueError("probe mode shears past a resolvable band; "
                             "reduce --t, --k or --xi0")
    return GridSpec(nx=nx, ny=ny, lx=2.0 * math.pi, ly=2.0 * math.pi)


def cmd_oracle(args: argparse.Namespace) -> int:
    if args.print_defaults:
        _emit(render_json({"k": 1, "xi0": 0, "amplitude": 100.0, "t": 5.0,
                           "steps": 500}))
        return EXIT_OK
    if args.steps < 1:
        raise ValueError("--steps must be >= 1")
    k, xi0 = args.k, args.xi0
    grid = _oracle_grid(k, xi0, args.t)
    config = SimConfig(
        amplitude=args.amplitude, alpha=1.0, coupled=False, grid=grid,
        dt=args.t / args.steps, t_end=args.t, rescaled=True, nonlinear=False,
        sample_every=1, track_modes=((k, xi0),))
    f = SpectralField.zeros(grid)
    i, j = k % grid.nx, xi0 % grid.ny
    ic, jc = (-k) % grid.nx, (-xi0) % grid.ny
    if (i, j) == (ic, jc):
        f.coeffs[i, j] = 1.0
    else:
        f.coeffs[i, j] = 0.5
        f.coeffs[ic, jc] = 0.5
    result = run(config, f)
    col = "mode_k%d_xi%d_abs" % (k, xi0)
    a0 = result.samples[0][col]
    if a0 == 0.0:
        raise ValueError("probe mode fell outside the dealias band")
    worst = 0.0
    for row in result.samples:
        expected = a0 * linear_propagator(k, -xi0, 0.0, row["t"],
                                          args.amplitude)
        err = abs(row[col] - expected) / max(expected, 1e-300)
        worst = max(worst, err)
    final = result.samples[-1]
    payload = {
        "k": k, "xi0": xi0, "amplitude": args.amplitude, "t": args.t,
        "steps": args.steps, "grid": {"nx": grid.nx, "ny": grid.ny},
        "samples": len(result.samples),
        "initial_abs": a0,
        "final_abs": final[col],
        "final_expected": a0 * linear_propagator(k, -xi0, 0.0, final["t"],
                                                 args.amplitude),
        "max_rel_error": worst,
        "status": result.status,
    }
    _emit(render_json(payload))
    return _STATUS_EXIT[result.status]


def cmd_norms(args: argparse.Namespace) -> int:
    if args.print_defaults:
        _emit(render_json({"alpha": args.alpha, "amplitude": 1.0, "t": 0.0,
                           "shear": 0.0,
                           "params": asdict(reference_params(args.alpha))}))
        return EXIT_OK
    if args.checkpoint is None:
        raise ValueError("missing --checkpoint (or use --print-defaults)")
    if args.amplitude <= 0:
        raise ValueError("amplitude must be positive")
    params = _params_from_args(args)
    params.validate(args.alpha)
    f = load_checkpoint(args.checkpoint)
    aniso = anisotropic_norm(f, params.high_exp, params.low_exp)
    phys = physical_samples(f, args.shear)
    payload = {
        "grid": {"nx": f.grid.nx, "ny": f.grid.ny,
                 "lx": f.grid.lx, "ly": f.grid.ly},
        "mass": f.mass,
        "l2": f.l2_norm(),
        "phys_min": float(np.min(phys)),
        "phys_max": float(np.max(phys)),
        "anisotropic_norm": {"value": aniso.value,
                             "zero_mode_mass": aniso.zero_mode_mass,
                             "strict_finite": aniso.strict_finite},
        "space_time_pieces": instantaneous_pieces(
            f, params, args.amplitude, t=args.t, shear=args.shear),
        "space_time_pieces_dx13": instantaneous_pieces(
            f, params, args.amplitude, t=args.t, shear=args.shear,
            extra_kx13=True),
    }
    _emit(render_json(payload))
    return EXIT_OK


def _add_print_defaults(p: argparse.ArgumentParser) -> None:
    p.add_argument("--print-defaults", action="store_true",
                   help="print this subcommand's defaults and exit")


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=1.0,
                   help="background decay rate (0 disables decay)")
    p.add_argument("--published-defaults", action="store_true",
                   help="pin the reference parameter point for this alpha")
    p.add_argument("--high-exp", type=float, default=None,
                   help="high-frequency weight exponent")
    p.add_argument("--low-exp", type=float, default=None,
                   help="low-frequency weight exponent")
    p.add_argument("--gain", type=float, default=None,
                   help="growing-weight rate")
    p.add_argument("--weight-span", type=float, default=None,
                   help="ghost weight range above 1")
    p.add_argument("--theta-lin", type=float, default=None,
                   help="linear coefficient of the weight-drift bound")
    p.add_argument("--theta-quad", type=float, default=None,
                   help="quadratic coefficient of the weight-drift bound")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shearpks",
        description="Numerical laboratory for shear suppression of "
                    "chemotactic blow-up: exact constants and thresholds, "
                    "spectral runs, amplitude sweeps, checkpoint norms.")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="command")

    p = sub.add_parser("constants",
                       help="closed-form constants, thresholds, audit")
    _add_param_flags(p)
    p.add_argument("--coupled", action="store_true",
                   help="fluid-coupled closing instead of density-only")
    p.add_argument("--mode", choices=("split", "sharp"), default="split",
                   help="which threshold solve the headline value reports")
    p.add_argument("--audit", action="store_true",
                   help="recheck every published inequality; exit 4 on any "
                        "failure")
    p.add_argument("--norm-density", type=float, default=None,
                   help="anisotropic norm of the initial density")
    p.add_argument("--norm-density-frac", type=float, default=None,
                   help="anisotropic norm of its |Dx|^(1/3) shift")
    p.add_argument("--norm-vorticity", type=float, default=None,
                   help="anisotropic norm of the initial vorticity")
    p.add_argument("--norm-mass", type=float, default=None,
                   help="initial mass")
    p.add_argument("--norm-sup", type=float, default=None,
                   help="initial sup norm")
    p.add_argument("--out", default=None,
                   help="also write the JSON report to this file")
    _add_print_defaults(p)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("solve", help="run one simulation from an INI config")
    p.add_argument("config", nargs="?", default=None,
                   help="INI configuration file")
    p.add_argument("--out", default=None,
                   help="output directory (overrides [output] directory)")
    _add_print_defaults(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="amplitude sweep from a JSON plan")
    p.add_argument("--plan", default=None, help="JSON sweep plan file")
    p.add_argument("--out", default=None,
                   help="output directory for runs and reports")
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel worker processes")
    p.add_argument("--coupled", action="store_true",
                   help="with --print-defaults: plan for the coupled system")
    _add_print_defaults(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle",
                       help="linear run against the exact mode propagator")
    p.add_argument("--k", type=int, default=1,
                   help="horizontal wavenumber of the probe mode")
    p.add_argument("--xi0", type=int, default=0,
                   help="initial vertical wavenumber")
    p.add_argument("--amplitude", "--A", "-A", dest="amplitude", type=float,
                   default=100.0, help="shear amplitude of the rescaled run")
    p.add_argument("--t", type=float, default=5.0, help="integration time")
    p.add_argument("--steps", type=int, default=500,
                   help="number of time steps")
    _add_print_defaults(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("norms", help="static norms of a PKSC checkpoint")
    p.add_argument("--checkpoint", default=None, help="PKSC checkpoint file")
    _add_param_flags(p)
    p.add_argument("--amplitude", type=float, default=1.0,
                   help="amplitude entering the space-time weights")
    p.add_argument("--t", type=float, default=0.0,
                   help="time argument of the growing weight")
    p.add_argument("--shear", type=float, default=0.0,
                   help="accumulated shear of the stored comoving frame")
    _add_print_defaults(p)
    p.set_defaults(func=cmd_norms)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

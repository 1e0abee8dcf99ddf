from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from shearpks import (
    BootstrapSizes,
    InitialNorms,
    ModelCase,
    NormParams,
    ParameterError,
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

TWO_PI = 2.0 * math.pi

# three-decimal ceilings of the nine estimate constants, with the exact
# double-precision values they evaluate to at the reference point
CONSTANT_TABLE = {
    "transport": (12.088589102808688, 12.089),
    "transport_frac": (13.051756399772737, 13.052),
    "vort_source": (12.591553721802777, 12.592),
    "chemo_half": (4.110248608991557, 4.111),
    "chemo_third": (3.5509045498235805, 3.551),
    "chemo_third_flat": (3.914323797578862, 3.915),
    "fluid_half": (5.178588742769585, 5.179),
    "fluid_third": (1.4714609037436175, 1.472),
    "fluid_third_flat": (1.582483839420267, 1.583),
}


# --- beta function ---

def _beta_quad(x: float, y: float) -> float:
    # endpoint-weighted quadrature handles the t^(x-1) singularities exactly
    val, _ = integrate.quad(lambda t: 1.0, 0.0, 1.0, weight="alg",
                            wvar=(x - 1.0, y - 1.0))
    return val


@pytest.mark.parametrize("x,y", [(0.25, 0.4), (1.0 / 12.0, 0.2),
                                 (0.5, 0.5), (0.25, 0.65), (2.0, 3.0)])
def test_beta_against_quadrature(x, y):
    assert beta_function(x, y) == pytest.approx(_beta_quad(x, y), rel=1e-12)


def test_beta_known_values():
    assert beta_function(1.0, 1.0) == pytest.approx(1.0, rel=1e-15)
    assert beta_function(0.5, 0.5) == pytest.approx(math.pi, rel=1e-14)
    assert beta_function(2.0, 3.0) == pytest.approx(1.0 / 12.0, rel=1e-14)
    assert beta_function(0.25, 0.4) == pytest.approx(5.807488203919795,
                                                     rel=1e-13)


@given(st.floats(0.05, 20.0), st.floats(0.05, 20.0))
@settings(max_examples=300)
def test_beta_symmetry(x, y):
    a, b = beta_function(x, y), beta_function(y, x)
    assert a == pytest.approx(b, rel=1e-12)


@given(st.floats(0.1, 10.0), st.floats(0.1, 10.0))
@settings(max_examples=200)
def test_beta_recurrence(x, y):
    # B(x+1, y) = B(x, y) * x / (x + y)
    lhs = beta_function(x + 1.0, y)
    rhs = beta_function(x, y) * x / (x + y)
    assert lhs == pytest.approx(rhs, rel=1e-12)


@pytest.mark.parametrize("x,y", [(0.0, 1.0), (-1.0, 2.0), (1.0, 0.0),
                                 (1.0, -0.5), (math.inf, 1.0)])
def test_beta_rejects_bad_domain(x, y):
    with pytest.raises(ValueError):
        beta_function(x, y)


# --- parameter validation ---

def test_reference_params_selects_exponents():
    decay = reference_params(1.0)
    flat = reference_params(0.0)
    assert (decay.low_exp, decay.high_exp) == (0.25, 0.9)
    assert (flat.low_exp, flat.high_exp) == (5.0 / 12.0, 0.7)
    assert decay.gain == pytest.approx(1.0 / (2000.0 * math.pi), rel=1e-15)
    assert decay.weight_span == 1.0
    assert is_reference_point(decay, 1.0)
    assert is_reference_point(flat, 0.0)
    assert not is_reference_point(decay, 0.0)


@pytest.mark.parametrize("kwargs,fragment", [
    (dict(low_exp=0.6), "0 < low_exp < 1/2 < high_exp"),
    (dict(high_exp=0.4), "0 < low_exp < 1/2 < high_exp"),
    (dict(low_exp=-0.1), "0 < low_exp < 1/2 < high_exp"),
    (dict(theta_lin=0.0), "0 < theta_lin <= 1"),
    (dict(theta_lin=1.5), "0 < theta_lin <= 1"),
    (dict(theta_quad=0.0), "0 < theta_quad <= 1"),
    (dict(theta_lin=1.0, theta_quad=0.2), "2*sqrt(theta_quad)"),
    (dict(weight_span=20.0), "theta_quad*weight_span < 4*pi"),
    (dict(gain=1.0), "4*pi*gain < theta_lin*weight_span"),
    (dict(gain=0.0), "4*pi*gain"),
])
def test_param_invariants_rejected(kwargs, fragment):
    params = NormParams(**kwargs)
    with pytest.raises(ParameterError, match=None) as exc:
        params.validate()
    assert fragment in str(exc.value)


def test_flat_case_needs_larger_low_exp():
    params = NormParams(low_exp=0.3)
    params.validate()          # fine when a background decay is present
    params.validate(alpha=2.0)
    with pytest.raises(ParameterError) as exc:
        params.validate(alpha=0.0)
    assert "low_exp > 1/3" in str(exc.value)


def test_derived_gaps_at_reference():
    p = reference_params(1.0)
    assert p.half_gap == pytest.approx(1.0 / TWO_PI - 1.0 / (1000.0 * math.pi),
                                       rel=1e-14)
    assert p.damp_gap == pytest.approx(2.0 - 1.0 / TWO_PI, rel=1e-15)
    assert p.span_frac == pytest.approx(1.0 / TWO_PI, rel=1e-15)
    assert p.peak_weight == pytest.approx(2.0 / math.sqrt(TWO_PI), rel=1e-15)


# --- the nine constants ---

def test_nine_constants_frozen_and_under_table():
    rep = bound_constants(reference_params(1.0))
    nine = rep.nine_constants()
    assert set(nine) == set(CONSTANT_TABLE)
    for name, (value, ceiling) in CONSTANT_TABLE.items():
        assert nine[name] == pytest.approx(value, rel=1e-12), name
        assert nine[name] < ceiling, name
        assert nine[name] >= 0.999 * ceiling, name


def test_chemo_half_closed_form():
    rep = bound_constants(reference_params(1.0))
    want = (2.0 ** (5.0 / 3.0) * math.pi ** 0.25 * 3.0 ** -0.5
            * (1000.0 / 499.0) ** 0.75)
    assert rep.chemo_half == pytest.approx(want, rel=1e-13)


def test_constants_ignore_exponents():
    # the nine constants depend on the gap/span structure only
    a = bound_constants(reference_params(1.0)).nine_constants()
    b = bound_constants(reference_params(0.0)).nine_constants()
    assert a == b


def test_constants_reject_invalid_params():
    with pytest.raises(ParameterError):
        bound_constants(NormParams(theta_lin=1.0, theta_quad=0.1))


# --- rate factors ---

def test_rate_factors_frozen():
    p1, p0 = reference_params(1.0), reference_params(0.0)
    r1 = rate_factor(p1, ModelCase(alpha=1.0))
    r2 = rate_factor(p0, ModelCase(alpha=0.0))
    assert r1 == pytest.approx(4.976728844970946, rel=1e-12)
    assert r1 < 4.977
    assert r2 == pytest.approx(7.840950199815285, rel=1e-12)
    assert r2 < 7.841


def test_rate_alpha_scaling():
    p = reference_params(1.0)
    unit = rate_factor(p, ModelCase(alpha=1.0))
    assert rate_factor(p, ModelCase(alpha=4.0)) == \
        pytest.approx(unit * 4.0 ** -0.25, rel=1e-14)
    # the coupled closing never gains from alpha > 1
    assert rate_factor(p, ModelCase(alpha=4.0, coupled=True)) == \
        pytest.approx(unit, rel=1e-14)
    assert rate_factor(p, ModelCase(alpha=0.25, coupled=True)) == \
        pytest.approx(unit * 0.25 ** -0.25, rel=1e-14)


def test_rate_rejects_flat_exponent_misuse():
    with pytest.raises(ParameterError):
        rate_factor(reference_params(1.0), ModelCase(alpha=0.0))


# --- thresholds ---

SPLIT_FROZEN = {
    (1.0, False): 389255.89615038974,
    (0.0, False): 2058613.9852849827,
    (1.0, True): 1012083.4026258508,
    (0.0, True): 4672042.021706748,
    (4.0, False): 194627.94807519487,
}
SHARP_FROZEN = {
    (1.0, False): 78697.89940597635,
    (0.0, False): 589229.8615020826,
    (1.0, True): 1011737.3600935361,
    (0.0, True): 4670131.032447923,
    (4.0, False): 30063.268804123243,
}


@pytest.mark.parametrize("alpha,coupled", sorted(SPLIT_FROZEN))
def test_threshold_frozen_values(alpha, coupled):
    params = reference_params(alpha)
    rep = bound_constants(params)
    case = ModelCase(alpha=alpha, coupled=coupled)
    split = solve_threshold_detail(rep, params, case, "split")
    sharp = solve_threshold_detail(rep, params, case, "sharp")
    assert split.value == pytest.approx(SPLIT_FROZEN[(alpha, coupled)],
                                        rel=1e-9)
    assert sharp.value == pytest.approx(SHARP_FROZEN[(alpha, coupled)],
                                        rel=1e-9)
    assert sharp.value < split.value
    assert split.converged and sharp.converged
    assert not sharp.already_stable
    # the bisection certificate: g crosses 1 exactly at the sharp value
    g = closing_curve(rep, params, case)
    assert abs(g(sharp.value) - 1.0) <= 1e-12


def test_split_targets_are_the_published_products():
    params = reference_params(1.0)
    rep = bound_constants(params)
    res = solve_threshold_detail(rep, params, ModelCase(alpha=1.0), "split")
    assert res.targets["half"] == pytest.approx(
        11.0 ** 2 * 4.0 * 16.0 ** 2 * math.pi, rel=1e-13)
    assert res.targets["third"] == pytest.approx(
        (11.0 / 9.0) ** 3 * 8.0 * 54.0 ** 3 / 5.0 ** 3 * 13.0, rel=1e-13)
    flat = reference_params(0.0)
    res0 = solve_threshold_detail(bound_constants(flat), flat,
                                  ModelCase(alpha=0.0), "split")
    assert res0.targets["half"] == pytest.approx(1378713.6, rel=1e-13)
    assert res0.targets["third"] == pytest.approx(2058613.9852849827,
                                                  rel=1e-12)


def test_published_threshold_values():
    assert published_threshold(ModelCase(alpha=1.0)) == 389256.0
    assert published_threshold(ModelCase(alpha=4.0)) == \
        pytest.approx(194628.0, rel=1e-15)
    assert published_threshold(ModelCase(alpha=0.0)) == 2058614.0
    assert published_threshold(ModelCase(alpha=1.0, coupled=True)) == 1.013e6
    assert published_threshold(ModelCase(alpha=0.0, coupled=True)) == 4.673e6
    small = published_threshold(ModelCase(alpha=0.01))
    assert small == pytest.approx(239197.0 * 0.01 ** -0.75, rel=1e-15)


def test_mode_must_be_split_or_sharp():
    params = reference_params(1.0)
    rep = bound_constants(params)
    with pytest.raises(ValueError, match="split"):
        solve_threshold_detail(rep, params, ModelCase(), "exact")


def _admissible_params(draw_low, draw_high, alpha):
    low = draw_low if alpha > 0 else max(draw_low, 0.35)
    return NormParams(high_exp=draw_high, low_exp=low)


@given(st.floats(0.05, 0.45), st.floats(0.55, 1.5),
       st.sampled_from([0.0, 0.5, 1.0, 3.0]))
@settings(max_examples=100, deadline=None)
def test_sharp_never_exceeds_split(low, high, alpha):
    params = _admissible_params(low, high, alpha)
    rep = bound_constants(params)
    case = ModelCase(alpha=alpha)
    split = solve_amplitude_threshold(rep, params, case, "split")
    sharp = solve_amplitude_threshold(rep, params, case, "sharp")
    assert sharp <= split * (1.0 + 1e-9)


@given(st.floats(0.05, 0.45), st.floats(0.55, 1.5),
       st.sampled_from([0.0, 0.5, 1.0, 3.0]), st.booleans())
@settings(max_examples=60, deadline=None)
def test_closing_curve_strictly_decreasing(low, high, alpha, coupled):
    params = _admissible_params(low, high, alpha)
    rep = bound_constants(params)
    g = closing_curve(rep, params, ModelCase(alpha=alpha, coupled=coupled))
    xs = [1.0, 3.0, 10.0, 1e2, 1e4, 1e8, 1e12]
    vals = [g(x) for x in xs]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_already_stable_flag():
    # shrink every constant so g(1) <= 1 and no amplitude is needed
    params = reference_params(1.0)
    rep = bound_constants(params)
    for name in rep.nine_constants():
        setattr(rep, name, 1e-9)
    res = solve_threshold_detail(rep, params, ModelCase(alpha=1.0), "sharp")
    assert res.already_stable
    assert res.value == 1.0


# --- bootstrap sizes ---

def test_bootstrap_all_zero_flat_case():
    sizes = bootstrap_sizes(InitialNorms(), ModelCase(alpha=0.0))
    assert sizes.size == 1.0
    want = 128.0 * ((4.0 / math.pi ** 2) * (3.0 + 2.0 * math.sqrt(2.0)) ** 2
                    * 1.01 ** 2 + 1.0) * 2.01
    assert sizes.size_sup == pytest.approx(want, rel=1e-14)
    assert sizes.size_sup == pytest.approx(3870.644404052949, rel=1e-12)


def test_bootstrap_density_only():
    sizes = bootstrap_sizes(InitialNorms(density=2.0), ModelCase(alpha=1.0))
    assert sizes.size == pytest.approx(math.sqrt(5.0), rel=1e-15)
    want = 128.0 * (math.sqrt(1.0 / TWO_PI) * (1.01 * math.sqrt(5.0)) ** 2
                    + 1.0) * (1.01 * math.sqrt(5.0) + 1.0)
    assert sizes.size_sup == pytest.approx(want, rel=1e-14)


def test_bootstrap_alpha_one_all_zero():
    sizes = bootstrap_sizes(InitialNorms(), ModelCase(alpha=1.0))
    assert sizes.size == 1.0
    want = 128.0 * (math.sqrt(1.0 / TWO_PI) * 1.01 ** 2 + 1.0) * 2.01
    assert sizes.size_sup == pytest.approx(want, rel=1e-14)


def test_bootstrap_coupled_adds_extra_norms():
    norms = InitialNorms(density=1.0, density_frac=2.0, vorticity=3.0)
    uncoupled = bootstrap_sizes(norms, ModelCase(alpha=1.0))
    coupled = bootstrap_sizes(norms, ModelCase(alpha=1.0, coupled=True))
    assert uncoupled.size == pytest.approx(math.sqrt(2.0), rel=1e-15)
    assert coupled.size == pytest.approx(math.sqrt(15.0), rel=1e-15)
    assert isinstance(coupled, BootstrapSizes)


def test_initial_norms_reject_negative():
    with pytest.raises(ValueError) as exc:
        InitialNorms(vorticity=-1.0).validate()
    assert "vorticity" in str(exc.value)
    with pytest.raises(ValueError):
        InitialNorms(mass=math.nan).validate()


# --- audit and report assembly ---

def test_audit_chain_all_pass():
    audit = audit_reference_chain()
    assert len(audit.rows) == 44
    assert audit.ok
    assert audit.failures == []
    for row in audit.as_list():
        assert row["pass"] is True
        assert math.isfinite(row["lhs"]) and math.isfinite(row["rhs"])


def test_build_report_reference_point():
    params = reference_params(1.0)
    rep = build_report(params, ModelCase(alpha=1.0))
    assert rep.threshold_published == 389256.0
    assert rep.threshold_split == pytest.approx(SPLIT_FROZEN[(1.0, False)],
                                                rel=1e-9)
    assert rep.threshold_sharp == pytest.approx(SHARP_FROZEN[(1.0, False)],
                                                rel=1e-9)
    assert rep.rate == rep.rate_uncoupled
    assert rep.rate_coupled is not None
    assert rep.rate_flat is None        # low_exp = 1/4 <= 1/3
    assert rep.size is None


def test_build_report_off_reference_and_norms():
    params = NormParams(high_exp=0.8, low_exp=0.4)
    rep = build_report(params, ModelCase(alpha=1.0),
                       norms=InitialNorms(density=2.0))
    assert rep.threshold_published is None
    assert rep.rate_flat is not None    # low_exp > 1/3 admits the flat rate
    assert rep.size == pytest.approx(math.sqrt(5.0), rel=1e-15)
    assert rep.size_sup is not None
    d = rep.as_dict()
    assert d["threshold_split"] == rep.threshold_split

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from opmono.exponents import ExponentSpec, ScaledSpec, Status, check_sufficient
from opmono.families import (
    FamilyStatus,
    Lehmer,
    PowerDifference,
    confirm_monotone,
    confirm_not_monotone,
    f_a_function,
    f_a_spec,
    h1_classify,
    h1_function,
    h2_boundary_imag,
    h2_classify,
    h2_function,
    h2_to_ratio_spec,
    mc_build,
    mc_eval,
    mc_route_ratio,
    mean_eval,
    mean_function,
)
from opmono.loewner import eval_f

from oracles import h1_ref, h2_ref, sinh_route_ref

M = FamilyStatus.MONOTONE
N = FamilyStatus.NOT_MONOTONE
U = FamilyStatus.UNKNOWN
T = np.geomspace(1e-3, 1e3, 37)


# --- f_a -------------------------------------------------------------------------------


def test_f_a_half():
    assert eval_f(f_a_spec(0.5), 4.0) == pytest.approx(2.25, rel=1e-14)


def test_f_a_minus_one_reduces():
    s = f_a_spec(-1.0)
    assert s.spec == ExponentSpec(1.0, (1.0,), (2.0,)) and s.scale == 2.0
    assert eval_f(s, 1.0) == pytest.approx(1.0, rel=1e-15)
    assert eval_f(s, 3.0) == pytest.approx(2 * 3 / 4, rel=1e-14)


def test_f_a_two_reduces():
    s = f_a_spec(2.0)
    assert s.spec == ExponentSpec(1.0, (1.0,), (2.0,)) and s.scale == 2.0


@pytest.mark.parametrize("a", [-1.5, 0.0, 1.0, 2.5])
def test_f_a_rejects(a):
    with pytest.raises(ValueError):
        f_a_spec(a)


@given(st.floats(min_value=-1, max_value=2))
def test_f_a_spec_matches_direct_form(a):
    assume(min(abs(a), abs(a - 1)) > 1e-3)
    s = f_a_spec(a)
    assert isinstance(s, ScaledSpec)
    assert np.allclose(eval_f(s, T), f_a_function(a).value(T), rtol=1e-12)


@given(st.floats(min_value=-1, max_value=2))
def test_f_a_symmetry(a):
    assert np.allclose(f_a_function(a).value(T), f_a_function(1 - a).value(T), rtol=1e-12)


def test_f_a_log_mean_extension():
    t = np.array([0.3, 2.0, 50.0])
    expected = (t - 1) / np.log(t)
    assert np.allclose(f_a_function(0.0).value(t), expected, rtol=1e-14)
    assert np.allclose(f_a_function(1.0).value(t), expected, rtol=1e-14)


# --- h1 ------------------------------------------------------------------------------


@pytest.mark.parametrize("ab, status", [((1.5, 0.5), M), ((0.3, 0.7), N), ((1.0, -1.0), M),
                                        ((0.5, -0.5), M), ((2.0, 0.5), N), ((-1.5, -1.8), N),
                                        ((1.0, 0.0), M), ((0.0, -1.0), M), ((1.5, -0.2), N)])
def test_h1_classify_examples(ab, status):
    assert h1_classify(*ab).status is status


def test_h1_identity_case():
    assert np.allclose(h1_function(1.0, -1.0).value(T), T, rtol=1e-14)


def test_h1_rejects():
    with pytest.raises(ValueError):
        h1_classify(0.5, 0.5)
    with pytest.raises(ValueError):
        h1_classify(2.5, 0.5)


pair = st.tuples(st.floats(min_value=-2, max_value=2), st.floats(min_value=-2, max_value=2))


@settings(max_examples=100)
@given(pair, st.floats(min_value=-3, max_value=3))
def test_h1_reciprocal(ab, log10_t):
    a, b = ab
    assume(abs(a - b) > 1e-6)
    t = 10.0 ** log10_t
    assert h1_function(a, b).value(t) * h1_function(b, a).value(t) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(pair, st.floats(min_value=-3, max_value=3))
def test_h1_matches_reference(ab, log10_t):
    a, b = ab
    assume(abs(a - b) > 1e-6 and abs(log10_t) > 1e-9)
    t = 10.0 ** log10_t
    # the reference uses the un-normalised (t^c - 1)/c form with log at c = 0
    assert h1_function(a, b).value(t) == pytest.approx(float(h1_ref(a, b, t)), rel=1e-11)


def _grid(step):
    n = int(round(2 / step))
    return [round(k * step, 10) for k in range(-n, n + 1)]


@pytest.mark.slow
def test_h1_grid_oracles_step_01():
    for a in _grid(0.1):
        for b in _grid(0.1):
            if a == b:
                continue
            f = h1_function(a, b)
            if h1_classify(a, b).status is M:
                assert confirm_monotone(f, [np.geomspace(0.1, 10, 5)]), (a, b)
            else:
                assert confirm_not_monotone(f) is not None, (a, b)


# --- h2 ------------------------------------------------------------------------------


@pytest.mark.parametrize(
    "ab, status",
    [((0.7, -0.2), M), ((1.0, -0.5), N), ((0.9, -0.5), U), ((0.5, -0.5), M), ((0.5, 0.2), N),
     ((-0.3, -0.6), N), ((0.5, -1.0), N), ((1.0, 0.0), M), ((0.0, -1.0), M), ((1.0, -1.0), M)],
)
def test_h2_classify_examples(ab, status):
    assert h2_classify(*ab).status is status


def test_h2_rejects_equal():
    with pytest.raises(ValueError):
        h2_classify(0.3, 0.3)


def test_h2_ratio_spec_example():
    s = h2_to_ratio_spec(0.7, -0.2)
    assert s.scale == 1.0
    assert s.spec.gamma == pytest.approx(0.2)
    assert s.spec.alphas == pytest.approx((1.4, 0.2))
    assert s.spec.betas == pytest.approx((0.7, 0.4))
    v = check_sufficient(s.spec)
    assert v.status is Status.PROVED_MONOTONE
    assert v.certificate.lower_sum == pytest.approx(0.2)
    assert v.certificate.upper_sum == pytest.approx(0.7)
    for t in (0.3, 1.0, 7.0):
        assert eval_f(s, t) == pytest.approx(float(h2_ref(0.7, -0.2, t)), rel=1e-12)


def test_h2_degenerate_is_power():
    s = h2_to_ratio_spec(0.5, -0.5)
    assert s.spec == ExponentSpec(0.5) and s.scale == 1.0


def test_h2_ratio_spec_rejects():
    with pytest.raises(ValueError):
        h2_to_ratio_spec(0.0, -0.5)
    with pytest.raises(ValueError):
        h2_to_ratio_spec(0.5, 0.1)


@settings(max_examples=60)
@given(st.floats(min_value=0.01, max_value=1), st.floats(min_value=-1, max_value=-0.01),
       st.floats(min_value=-3, max_value=3))
def test_h2_ratio_spec_pointwise(a, b, log10_t):
    assume(abs(a + b) > 1e-6)
    t = 10.0 ** log10_t
    assert eval_f(h2_to_ratio_spec(a, b), t) == pytest.approx(float(h2_ref(a, b, t)), rel=1e-12)


@settings(max_examples=60)
@given(pair, st.floats(min_value=-3, max_value=3))
def test_h2_reciprocal_and_reference(ab, log10_t):
    a, b = ab
    assume(abs(a - b) > 1e-6)
    t = 10.0 ** log10_t
    assert h2_function(a, b).value(t) * h2_function(b, a).value(t) == pytest.approx(1.0, abs=1e-12)
    assert h2_function(a, b).value(t) == pytest.approx(float(h2_ref(a, b, t)), rel=1e-12)


@given(st.floats(min_value=0.01, max_value=2), st.floats(min_value=-3, max_value=3))
def test_h2_power_case(a, log10_t):
    t = 10.0 ** log10_t
    assert h2_function(a, -a).value(t) == pytest.approx(t**a, rel=1e-12)


def test_h2_negative_clause_signs():
    r = np.geomspace(1.01, 1e4, 400)
    # a = 1, b = -0.5: Im h2(-r) = r^b (r - 1) sin(b pi) / |.|^2 < 0 for r > 1
    assert np.any(h2_boundary_imag(1.0, -0.5, r) < 0)
    expected_sign = np.sign(r**-0.5 * (r - 1) * math.sin(-0.5 * math.pi))
    assert np.all(np.sign(h2_boundary_imag(1.0, -0.5, r)) == expected_sign)
    # b = -1, 0 < a < 1: sign follows r^a (1 - 1/r) sin(a pi) with the sign flipped
    r2 = np.geomspace(1e-4, 0.99, 400)
    assert np.any(h2_boundary_imag(0.5, -1.0, r2) < 0)


@pytest.mark.parametrize("ab", [(1.0, -0.5), (0.5, -1.0), (0.5, 0.2), (-0.3, -0.6)])
def test_h2_negative_points_confirmed(ab):
    c = confirm_not_monotone(h2_function(*ab))
    assert c is not None and c.witness is not None


@pytest.mark.parametrize("ab", [(0.7, -0.2), (0.5, -0.5)])
def test_h2_positive_points_pass(ab):
    assert confirm_monotone(h2_function(*ab))


# --- Morozova-Chentsov ------------------------------------------------------------------


def test_mc_gamma_example():
    mc = mc_build((0.5,), (0.3,))
    assert mc.gamma_sym == pytest.approx(0.4, abs=1e-15)
    assert mc.gamma_printed == pytest.approx(0.6, abs=1e-15)
    f = lambda t: eval_f(mc.spec, t)  # noqa: E731
    for t in (0.2, 3.0, 40.0):
        assert abs(f(t) - t * f(1 / t)) < 1e-12


def test_mc_balanced_case():
    mc = mc_build((0.5, 1.5), (0.8, 1.2))
    assert mc.gamma_sym == pytest.approx(0.5, abs=1e-15)
    assert mc_route_ratio(mc, 4.0, 1.0) == pytest.approx(1.0, abs=1e-12)


def test_mc_diagonal_values():
    mc = mc_build((0.5,), (0.3,))
    assert mc_eval(mc, 2.0, 2.0, "sinh") == pytest.approx(0.3, rel=1e-15)
    assert mc_eval(mc, 2.0, 2.0, "ratio") == pytest.approx(0.5 * 0.3 / 0.5, rel=1e-15)


def test_mc_sinh_symmetric():
    mc = mc_build((0.5, 1.1), (0.3, 1.7))
    assert mc_eval(mc, 2.0, 1.0, "sinh") == pytest.approx(mc_eval(mc, 1.0, 2.0, "sinh"), rel=1e-14)


def test_mc_routes_and_printed_gamma():
    mc = mc_build((0.5,), (0.3,))
    assert mc_route_ratio(mc, 2.0, 1.0) == pytest.approx(1.0, abs=1e-12)
    assert mc_route_ratio(mc, 2.0, 1.0, gamma=mc.gamma_printed) == pytest.approx(2.0 ** -0.2, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=-4, max_value=4), st.floats(min_value=-4, max_value=4))
def test_mc_sinh_matches_reference(x, y):
    al, be = (0.5, 1.3), (0.2, 1.9)
    mc = mc_build(al, be)
    lam, mu = 10.0 ** x, 10.0 ** y
    assert mc_eval(mc, lam, mu, "sinh") == pytest.approx(float(sinh_route_ref(al, be, lam, mu)), rel=1e-12)


def test_mc_rejects():
    with pytest.raises(ValueError):
        mc_build((0.5,), (-0.3,))
    mc = mc_build((0.5,), (0.3,))
    with pytest.raises(ValueError):
        mc_eval(mc, 0.0, 1.0)
    with pytest.raises(ValueError):
        mc_eval(mc, 1.0, 1.0, "other")


# --- means --------------------------------------------------------------------------------


def test_mean_examples():
    assert mean_eval(PowerDifference(2.0), 3.0) == pytest.approx(2.0, rel=1e-15)
    assert mean_eval(Lehmer(1.0), 3.0) == pytest.approx(2.0, rel=1e-15)
    assert mean_eval(Lehmer(0.5), 9.0) == pytest.approx(3.0, rel=1e-15)


@given(st.floats(min_value=-1, max_value=2), st.floats(min_value=-3, max_value=3))
def test_power_difference_identity(alpha, log10_t):
    t = 10.0 ** log10_t
    assume(abs(t - 1) > 1e-3 and min(abs(alpha), abs(alpha - 1)) > 1e-3)
    tm, am = mp.mpf(t), mp.mpf(alpha)
    direct = (am - 1) / am * mp.expm1(am * mp.log(tm)) / mp.expm1((am - 1) * mp.log(tm))
    assert mean_eval(PowerDifference(alpha), t) == pytest.approx(float(direct), rel=1e-12)


@given(st.floats(min_value=0, max_value=1), st.floats(min_value=-3, max_value=3))
def test_lehmer_identity(p, log10_t):
    t = 10.0 ** log10_t
    assert mean_eval(Lehmer(p), t) == pytest.approx((t**p + 1) / (t ** (p - 1) + 1), rel=1e-12)


def test_mean_rejects():
    with pytest.raises(ValueError):
        mean_eval(PowerDifference(2.5), 1.0)
    with pytest.raises(ValueError):
        mean_eval(Lehmer(1.5), 1.0)
    with pytest.raises(TypeError):
        mean_function("geometric")

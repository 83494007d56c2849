import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cutoffot.costs import builtin_cost
from cutoffot.errors import BadAnchor, BoundaryPoint, HypothesisViolated, InfiniteMoment, NotBoundedBelow
from cutoffot.measures import (
    LogConcaveDensity,
    cumulative_profile,
    gaussian,
    gaussian_logconcave,
    pareto_tail,
    uniform_ball,
)
from cutoffot.oracles import disk_to_gaussian, gaussian_to_disk
from cutoffot.radial_ot import w1_exact_radial
from cutoffot.rate_bounds import (
    l2_rate_bound,
    logconcave_tail_constant,
    map_error_bound_inverse,
    map_gap,
    optimize_anchor,
    potential_error_bound_inverse,
    potential_gap,
    preimage_error_bound,
    preimage_gap,
    tail_bound_logconcave,
    tail_bound_moment,
    validity_radius,
    w1_cutoff_bound,
    w1_logconcave_bound,
    w1_logconcave_constant,
    w1_moment_bound,
)

R_GRID = (1.0, 1.5, 2.0, 3.0, 4.0)


def test_map_bound_spot_values(ref, gauss_disk):
    mu, nu, F_mu, F_nu = gauss_disk
    b = map_error_bound_inverse(mu, nu, 1.0, F_mu, F_nu)
    assert b.constants["C"] == pytest.approx(ref["map_bound_C_x1"][0], abs=1e-8)
    assert b(2.0) == pytest.approx(ref["map_bound_x1_R2"][0], abs=1e-8)
    assert b.R0 == pytest.approx(ref["validity_radius_gauss"][0], abs=1e-9)
    assert float(map_gap(mu, nu, 1.0, 2.0, F_mu, F_nu)) == pytest.approx(ref["map_gap_x1_R2"][0], abs=1e-9)
    assert math.isnan(b(1.0))
    assert not b.is_valid(1.0)


def test_map_bound_dominates_on_grid(gauss_disk):
    mu, nu, F_mu, F_nu = gauss_disk
    for x in (0.25, 0.5, 1.0, 2.0, 4.0):
        b = map_error_bound_inverse(mu, nu, x, F_mu, F_nu)
        for R in R_GRID + (6.0,):
            if b.is_valid(R):
                assert float(map_gap(mu, nu, x, R, F_mu, F_nu)) <= b.value(R) + 1e-9


def test_map_bound_finite_far_out(gauss_disk):
    mu, nu, F_mu, F_nu = gauss_disk
    b = map_error_bound_inverse(mu, nu, 30.0, F_mu, F_nu)
    assert b.constants["p"] == pytest.approx(1.0) and math.isfinite(b.constants["C"])


def test_map_bound_needs_lower_bound(gauss_disk):
    with pytest.raises(NotBoundedBelow):
        map_error_bound_inverse(gaussian(2), gaussian(2), 1.0)


def test_preimage_corrected_bound(ref, gauss_disk):
    mu, nu, F_mu, F_nu = gauss_disk
    gap = float(preimage_gap(mu, nu, 0.5, 2.0, F_mu, F_nu))
    assert gap == pytest.approx(ref["preimage_gap_y05_R2"][0], abs=1e-9)
    for y in (0.1, 0.25, 0.5, 0.75, 0.9):
        b = preimage_error_bound(mu, nu, y, F_mu, F_nu)
        lip = preimage_error_bound(mu, nu, y, F_mu, F_nu, use_modulus=True)
        # sampled slope never exceeds the closed-form Lipschitz constant
        assert lip(2.0) <= b(2.0) and lip(2.0) == pytest.approx(b(2.0), rel=1e-3)
        for R in R_GRID:
            if b.is_valid(R):
                exact = disk_to_gaussian(y) - disk_to_gaussian(y, R)
                assert float(preimage_gap(mu, nu, y, R, F_mu, F_nu)) == pytest.approx(exact, abs=1e-8)
                assert exact <= lip(R) + 1e-9


def test_preimage_bound_as_stated_is_not_a_bound(gauss_disk):
    # without the sphere factor in the numerator the bound undershoots the measured gap
    mu, nu, F_mu, F_nu = gauss_disk
    stated = preimage_error_bound(mu, nu, 0.5, F_mu, F_nu, as_stated=True)
    assert float(preimage_gap(mu, nu, 0.5, 2.0, F_mu, F_nu)) > stated(2.0)


def test_preimage_limits(gauss_disk):
    mu, nu, F_mu, F_nu = gauss_disk
    vals = [preimage_error_bound(mu, nu, y, F_mu, F_nu)(2.0) for y in (0.2, 0.1, 0.05, 0.025)]
    assert all(b < a for a, b in zip(vals[:-1], vals[1:]))
    with pytest.raises(BoundaryPoint):
        preimage_error_bound(mu, nu, 1.0, F_mu, F_nu)


def test_potential_bound_quadratic(gauss_disk):
    mu, nu, F_mu, F_nu = gauss_disk
    q = builtin_cost("quadratic")
    b = potential_error_bound_inverse(q, mu, nu, 1.0, 0.05, F_mu, F_nu)
    assert b.constants["gamma"] == pytest.approx(2.05)
    C = 2.0 / (gaussian_to_disk(1.0) * 2.0)
    assert b.value(2.0) == pytest.approx(2 * 2.0 * C * 2.05 * math.exp(-2), rel=1e-8)
    # slack radius: the measured map gap at |x| = 1 equals eps there
    R1 = b.constants["R1"]
    assert float(map_gap(mu, nu, 1.0, R1, F_mu, F_nu)) == pytest.approx(0.05, abs=1e-8)
    for R in R_GRID + (6.0,):
        if b.is_valid(R):
            assert float(potential_gap(q, mu, nu, 1.0, R, F_mu, F_nu)) <= b(R)


def test_potential_bound_k_zero(gauss_disk):
    from cutoffot.costs import CostFunction

    mu, nu, F_mu, F_nu = gauss_disk
    huber = CostFunction("smooth_abs", lambda r: np.sqrt(1 + np.asarray(r) ** 2) - 1,
                         lambda r: np.asarray(r) / np.sqrt(1 + np.asarray(r) ** 2), (1.0, 0))
    b = potential_error_bound_inverse(huber, mu, nu, 1.0, 0.05, F_mu, F_nu)
    mb = map_error_bound_inverse(mu, nu, 1.0, F_mu, F_nu)
    assert b.value(3.0) == pytest.approx(2 * mb.value(3.0))


def test_potential_bound_requires_growth(gauss_disk):
    mu, nu, F_mu, F_nu = gauss_disk
    with pytest.raises(HypothesisViolated):
        potential_error_bound_inverse(builtin_cost("cosh_minus_one"), mu, nu, 1.0, 0.05, F_mu, F_nu)


def test_potential_gap_zero_for_equal_laws():
    F = cumulative_profile(uniform_ball(2))
    q = builtin_cost("quadratic")
    assert float(potential_gap(q, uniform_ball(2), uniform_ball(2), 0.5, 0.9, F, F)) >= 0


def test_moment_tail_bound():
    nu = gaussian(2)
    assert tail_bound_moment(nu, 2, 4.0) == pytest.approx(2.0 / 16)
    assert tail_bound_moment(nu, 2, 4.0) >= math.exp(-8)
    with pytest.raises(InfiniteMoment):
        tail_bound_moment(pareto_tail(3), 3, 4.0)
    assert tail_bound_moment(nu, 2, 1e8) < 1e-15


def test_logconcave_tail(ref):
    lc = gaussian_logconcave(2, r0=1.0)
    assert logconcave_tail_constant(lc) == pytest.approx(ref["logconcave_tail_C"][0], abs=1e-12)
    assert tail_bound_logconcave(lc, 2.0) == pytest.approx(ref["logconcave_tail_bound_2"][0], abs=1e-12)
    assert tail_bound_logconcave(lc, 1.0) == pytest.approx(2 * math.pi * logconcave_tail_constant(lc) * math.exp(-1))
    F = cumulative_profile(lc.density)
    R = np.linspace(1, 8, 30)
    ratio = F.tail(R) / tail_bound_logconcave(lc, R)
    assert np.all(ratio <= 1) and ratio[-1] < 1e-8
    with pytest.raises(ValueError):
        tail_bound_logconcave(lc, 0.5)


def test_anchor_optimization_tightens():
    lc = gaussian_logconcave(2, r0=0.5)
    best = optimize_anchor(lc, 4.0, r0_grid=np.linspace(0.5, 3.0, 26))
    assert tail_bound_logconcave(best, 4.0) <= tail_bound_logconcave(lc, 4.0)
    vals = [tail_bound_logconcave(lc.with_anchor(r0), 4.0) for r0 in (0.5, 1.0, 1.5, 2.0)]
    assert all(b < a for a, b in zip(vals[:-1], vals[1:]))


def test_bad_anchor():
    lc = gaussian_logconcave(2)
    with pytest.raises(BadAnchor):
        LogConcaveDensity(lc.density, lc.potential, (1.0, -1.0))
    with pytest.raises(BadAnchor):
        w1_logconcave_constant(0.0, 0.0, 2)


def test_w1_cutoff_bounds(ref):
    nu = gaussian(2)
    assert w1_cutoff_bound(nu, "ball", 2.0) == pytest.approx(ref["w1_cutoff_bound_ball_gauss_2"][0], abs=1e-9)
    cube = w1_cutoff_bound(nu, "cube", 2.0)
    F = cumulative_profile(nu)
    assert cube >= w1_exact_radial(F, F.truncate(2.0))
    assert w1_cutoff_bound(nu, "ball", 40.0) < 1e-100 + 1e-300


def test_w1_moment_bound():
    assert w1_moment_bound(gaussian(2), 2, 4.0) == pytest.approx(1.0)
    assert w1_moment_bound(gaussian(2), 2, 1.0) == pytest.approx(4.0)
    with pytest.raises(HypothesisViolated):
        w1_moment_bound(gaussian(2), 1, 2.0)
    with pytest.raises(InfiniteMoment):
        w1_moment_bound(pareto_tail(3), 3, 2.0)


def test_w1_moment_dominates_cutoff_bound_pareto():
    nu = pareto_tail(4)
    F = cumulative_profile(nu)
    R0 = validity_radius(F)
    for R in (1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 10.0):
        if R >= R0:
            assert w1_cutoff_bound(nu, "ball", R, F) <= w1_moment_bound(nu, 3, R)


def test_w1_logconcave_constant(ref):
    lc = gaussian_logconcave(2, r0=1.0)
    a, b = lc.linear_bound
    assert (a, b) == pytest.approx((1.0, math.log(2 * math.pi) - 0.5))
    assert w1_logconcave_constant(a, b, 2) == pytest.approx(ref["w1_logconcave_C_gauss"][0], rel=1e-12)
    assert w1_logconcave_constant(1e6, b, 2) < 1e-5


def test_w1_logconcave_chain():
    lc = gaussian_logconcave(2)
    F = cumulative_profile(lc.density)
    for R in (1.0, 2.0, 3.0, 4.0, 5.0):
        exact = w1_exact_radial(F, F.truncate(R))
        ball = w1_cutoff_bound(lc.density, "ball", R, F)
        assert exact <= ball <= w1_logconcave_bound(lc, R)
        assert w1_logconcave_bound(lc, R, "cube") == w1_logconcave_bound(lc, R)


def test_l2_rate(ref):
    r = l2_rate_bound(0.01, 5, 2)
    assert r.map_exponent == Fraction(5, 62)
    assert float(r.map_exponent) == pytest.approx(ref["map_exponent_5_2"][0], abs=1e-15)
    assert r.potential_exponent == Fraction(1, 2)
    assert r.potential_value == pytest.approx(0.1)
    z = l2_rate_bound(0.0, 6, 3)
    assert z.map_value == 0.0 and z.potential_value == 0.0
    for p, n in ((3, 2), (4, 4)):
        with pytest.raises(HypothesisViolated):
            l2_rate_bound(0.1, p, n)


@settings(max_examples=25, deadline=None)
@given(x=st.floats(0.05, 5.0), R1=st.floats(1.2, 8.0), R2=st.floats(1.2, 8.0))
def test_bounds_nonincreasing_and_dominating(gauss_disk, x, R1, R2):
    mu, nu, F_mu, F_nu = gauss_disk
    b = map_error_bound_inverse(mu, nu, x, F_mu, F_nu)
    lo, hi = min(R1, R2), max(R1, R2)
    assert b.value(hi) <= b.value(lo)
    assert b.value(hi) >= 0
    assert float(map_gap(mu, nu, x, lo, F_mu, F_nu)) <= b.value(lo) + 1e-9

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cutoffot.costs import builtin_cost
from cutoffot.errors import DimensionMismatch
from cutoffot.measures import cumulative_profile, gaussian, line_profile, uniform_ball
from cutoffot.oracles import (
    discrete_ot_1d,
    disk_quantile,
    fd_gradient_check,
    gaussian2_quantile,
    gaussian_to_disk,
    quantile_samples,
    w1_exact_1d,
)
from cutoffot.radial_ot import (
    brenier_potential,
    kantorovich_potential,
    map_trace,
    monotone_rearrangement_1d,
    radial_map,
    radial_potential,
    w1_exact_radial,
    w1_profiles,
    w2_from_profiles,
    w2_radial,
)
from cutoffot.rate_bounds import w1_cutoff_bound


def uniform_line(a, b):
    return line_profile(lambda t: np.where((t >= a) & (t <= b), 1.0 / (b - a), 0.0), a, b)


def test_uniform_to_exponential(ref):
    T = monotone_rearrangement_1d(uniform_line(0, 1), line_profile(lambda t: np.exp(-t), 0.0))
    assert T(0.5) == pytest.approx(ref["exp_quantile_half"][0], abs=1e-9)


def test_same_law_is_identity():
    F = uniform_line(0, 1)
    x = np.linspace(0.05, 0.95, 19)
    assert np.allclose(monotone_rearrangement_1d(F, F)(x), x, atol=1e-10)


def test_shift_map():
    T = monotone_rearrangement_1d(uniform_line(0, 2), uniform_line(1, 3))
    x = np.linspace(0.1, 1.9, 10)
    assert np.allclose(T(x), x + 1, atol=1e-10)


def test_gauss_to_disk_map(ref, gauss_disk):
    mu, nu, F_mu, F_nu = gauss_disk
    T = radial_map(F_mu, F_nu)
    assert T.S(1.0) == pytest.approx(ref["map_gauss_disk_1"][0], abs=1e-9)
    TR = radial_map(F_mu, F_nu, R=2.0)
    assert TR.S(1.0) == pytest.approx(ref["map_gauss_disk_1_R2"][0], abs=1e-9)
    assert T.S(0.0) == 0.0
    r = np.linspace(0, 5, 101)
    assert np.max(np.abs(T.S(r) - gaussian_to_disk(r))) < 1e-9
    assert np.all(np.diff(T.S(r)) >= 0)
    assert np.all(T.S(r) <= 1.0)


def test_full_map_direction(gauss_disk):
    mu, nu, F_mu, F_nu = gauss_disk
    T = radial_map(F_mu, F_nu)
    x = np.array([[3.0, 4.0], [0.0, 0.0]])
    y = T(x)
    assert np.allclose(y[0] / np.linalg.norm(y[0]), [0.6, 0.8])
    assert np.allclose(y[1], 0.0)


def test_identity_when_equal():
    F = cumulative_profile(gaussian(2))
    r = np.linspace(0.1, 4, 40)
    assert np.allclose(radial_map(F, F).S(r), r, atol=1e-9)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        radial_map(uniform_ball(2), gaussian(3))


def test_mu_to_nu_boundary_is_infinite(gauss_disk):
    mu, nu, F_mu, F_nu = gauss_disk
    q = radial_map(F_mu, F_nu, "mu_to_nu")
    assert q.S(1.0) == math.inf
    assert q.S(0.5) == pytest.approx(gaussian2_quantile(0.25), abs=1e-9)


def test_quantile_oracle_equivalence(gauss_disk):
    mu, nu, F_mu, F_nu = gauss_disk
    N = 10_000
    pairs = discrete_ot_1d(quantile_samples(gaussian2_quantile, N), quantile_samples(disk_quantile, N))
    T = radial_map(F_mu, F_nu)
    assert np.max(np.abs(T.S(pairs[:, 0]) - pairs[:, 1])) <= 2 / N + 1e-10


def test_pushforward_empirical_cdf(gauss_disk):
    # pushing nu's quantile sample through S lands on mu's quantile levels
    mu, nu, F_mu, F_nu = gauss_disk
    N = 4000
    x = quantile_samples(gaussian2_quantile, N)
    y = radial_map(F_mu, F_nu).S(x)
    levels = (np.arange(N) + 0.5) / N
    assert np.max(np.abs(F_mu(y) - levels)) <= 2 / N + 1e-9


def test_cutoff_map_decreases_in_R(gauss_disk):
    mu, nu, F_mu, F_nu = gauss_disk
    r = np.array([0.3, 1.0, 1.8])
    prev = None
    for R in (2.0, 2.5, 3.0, 4.0, 6.0):
        cur = radial_map(F_mu, F_nu, R=R).S(r)
        assert np.all(cur >= radial_map(F_mu, F_nu).S(r) - 1e-12)
        if prev is not None:
            assert np.all(cur <= prev + 1e-12)
        prev = cur


def test_potentials(ref, gauss_disk):
    mu, nu, F_mu, F_nu = gauss_disk
    q = builtin_cost("quadratic")
    phi = radial_potential(q, radial_map(F_mu, F_nu))
    assert phi.radial(1.0) == pytest.approx(ref["potential_quadratic_1"][0], abs=1e-9)
    assert phi(np.zeros(2)) == 0.0
    F = cumulative_profile(gaussian(2))
    assert np.allclose(radial_potential(q, radial_map(F, F)).radial(np.linspace(0, 3, 7)), 0.0, atol=1e-18)
    r = np.linspace(0, 3, 31)
    trace = map_trace(radial_map(F_mu, F_nu), phi, r)
    assert np.allclose(trace[:, 2], 0.5 * (r - trace[:, 1]) ** 2)


def test_brenier_relation_finite_differences(gauss_disk):
    """grad phi = x - T(x) for the c-concave potential of the quadratic cost."""
    mu, nu, F_mu, F_nu = gauss_disk
    T = radial_map(F_mu, F_nu)
    phi = kantorovich_potential(builtin_cost("quadratic"), T, r_max=6.0)
    for x in ([0.3, 0.4], [1.0, 0.2], [-0.7, 1.5]):
        rep = fd_gradient_check(phi, x, 1e-5, lambda p: p - T(p))
        assert rep["max_deviation"] < 1e-6
    u = brenier_potential(T, r_max=6.0)
    rep = fd_gradient_check(u, [0.8, -0.5], 1e-5, T)
    assert rep["max_deviation"] < 1e-6


def test_chain_rule_gradient(gauss_disk):
    mu, nu, F_mu, F_nu = gauss_disk
    phi = radial_potential(builtin_cost("quadratic"), radial_map(F_mu, F_nu))
    x = np.array([0.6, 0.9])
    rep = fd_gradient_check(phi, x, 1e-5, phi.gradient)
    assert rep["max_deviation"] < 1e-6


def test_w2_values(ref, gauss_disk):
    mu, nu, F_mu, F_nu = gauss_disk
    full = w2_radial(F_mu, F_nu)
    assert full == pytest.approx(ref["w2_gauss_disk"][0], abs=1e-7)
    F = cumulative_profile(gaussian(2))
    # W2^2 vanishes to quadrature accuracy; the square root amplifies the noise
    assert w2_radial(F, F) ** 2 <= 1e-14
    assert w2_from_profiles(uniform_line(0, 1), uniform_line(1, 2)) == pytest.approx(1.0, abs=1e-9)


def test_w2_cutoff_sequence(gauss_disk):
    mu, nu, F_mu, F_nu = gauss_disk
    full = w2_radial(F_mu, F_nu)
    vals = [w2_radial(F_mu, F_nu, R) for R in (1.0, 2.0, 3.0, 4.0)]
    assert all(b > a for a, b in zip(vals[:-1], vals[1:]))
    assert vals[-1] < full
    for R, v in zip((1.0, 2.0, 3.0, 4.0), vals):
        # first-order effect of truncation: |W2_R^2 - W2^2| <= (R^2 + 1) tail(R) up to the map shift
        assert abs(v - full) <= (R * R + 1) * F_nu.tail(R) / full
    assert w2_radial(F_mu, F_nu, 6.0) == pytest.approx(full, abs=1e-6)


def test_w1_exact_radial(ref):
    F = line_profile(lambda t: np.exp(-t), 0.0)
    assert w1_exact_radial(F, F.truncate(2.0)) == pytest.approx(ref["w1_exp_cutoff_2"][0], abs=1e-9)
    assert w1_profiles(F, F.truncate(2.0)) == pytest.approx(ref["w1_exp_cutoff_2"][0], abs=1e-8)
    assert w1_exact_radial(F, F.truncate(math.inf)) == 0.0
    d = gaussian(2)
    G = cumulative_profile(d)
    assert w1_exact_radial(G, G.truncate(2.0)) == pytest.approx(ref["w1_gauss_cutoff_2"][0], abs=1e-9)
    assert w1_exact_radial(uniform_ball(2), cumulative_profile(uniform_ball(2)).truncate(3.0)) == 0.0


def test_w1_exact_matches_scipy():
    G = cumulative_profile(gaussian(2))
    for R in (1.0, 3.0):
        o = w1_exact_1d(lambda t: float(G(t)), lambda t: min(float(G(t)) / float(G(R)), 1.0), 0, math.inf, (R,))
        assert w1_exact_radial(G, G.truncate(R)) == pytest.approx(o, abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(R=st.floats(0.5, 8.0))
def test_w1_exact_below_cutoff_bound(R):
    d = gaussian(2)
    G = cumulative_profile(d)
    assert w1_exact_radial(G, G.truncate(R)) <= w1_cutoff_bound(d, "ball", R, G) * (1 + 1e-9)


@settings(max_examples=30, deadline=None)
@given(a=st.floats(0, 5), b=st.floats(0, 5), R=st.floats(1.0, 6.0))
def test_map_monotone_property(gauss_disk, a, b, R):
    mu, nu, F_mu, F_nu = gauss_disk
    T = radial_map(F_mu, F_nu, R=R)
    lo, hi = min(a, b), max(a, b)
    assert T.S(lo) <= T.S(hi)
    assert T.S(hi) <= 1.0

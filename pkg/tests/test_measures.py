import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cutoffot.errors import EmptyCutoff, NonNormalizable, OutOfRange, UnknownDensity
from cutoffot.measures import (
    LogConcaveDensity,
    cube_mass,
    cumulative_profile,
    cutoff,
    density_from_name,
    exponential_logconcave,
    exponential_radial,
    gaussian,
    gaussian_logconcave,
    gaussian_mixture,
    inverse_profile,
    largest_finite_moment,
    line_profile,
    moment,
    pareto_tail,
    profile_table,
    radial_from_unnormalized,
    tail_mass,
    uniform_ball,
)
from cutoffot.oracles import gaussian2_cdf, gaussian2_quantile, quad_cdf

PROFILES = {
    "disk": uniform_ball(2),
    "gauss": gaussian(2),
    "exp3": exponential_radial(3),
    "pareto4": pareto_tail(4),
}


@pytest.fixture(scope="module")
def profiles():
    return {k: cumulative_profile(d) for k, d in PROFILES.items()}


def test_disk_profile(ref, profiles):
    F = profiles["disk"]
    assert F(0.5) == pytest.approx(ref["disk_cdf_half"][0], abs=1e-10)
    assert F(0.0) == 0.0
    assert F(1.0) == pytest.approx(1.0, abs=1e-12)


def test_gaussian_profile(ref, profiles):
    F = profiles["gauss"]
    assert F(1.0) == pytest.approx(ref["gaussian2_cdf_1"][0], abs=1e-10)
    t = np.linspace(0, 6, 61)
    assert np.max(np.abs(F(t) - gaussian2_cdf(t))) < 1e-10


@pytest.mark.parametrize("key", list(PROFILES))
def test_profile_matches_scipy_quadrature(key, profiles):
    d = PROFILES[key]
    for t in (0.3, 0.9, 2.5):
        assert profiles[key](t) == pytest.approx(quad_cdf(d, d.dim, t), abs=1e-9)


@pytest.mark.parametrize("key", list(PROFILES))
def test_profile_invariants(key, profiles):
    F = profiles[key]
    d = PROFILES[key]
    assert d.check_nonnegative()
    assert F(0.0) == 0.0
    vals = F(F.grid)
    assert np.all(np.diff(vals) >= 0)
    top = d.support_radius if math.isfinite(d.support_radius) else 1e4
    assert F(top) == pytest.approx(1.0, abs=1e-8)
    # levels that round to 1 map to +inf on unbounded laws by convention
    keep = vals < 1.0
    inv = F.inverse(vals[keep])
    assert np.all(inv <= F.grid[keep] * (1 + 1e-12) + 1e-12)


def test_inverse_examples(profiles):
    F = profiles["disk"]
    assert inverse_profile(F, 0.25) == pytest.approx(0.5, abs=1e-12)
    assert inverse_profile(F, 0.0) == 0.0
    with pytest.raises(OutOfRange):
        inverse_profile(F, 1.5)
    G = profiles["gauss"]
    s = np.linspace(0.001, 0.999, 200)
    assert np.max(np.abs(G.inverse(s) - gaussian2_quantile(s))) < 1e-9
    assert G.inverse(1.0) == math.inf


def test_inverse_flat_region_left_endpoint():
    # profile vanishing on (1, 2)
    prof = lambda r: np.where((r < 1) | ((r > 2) & (r < 3)), 1.0, 0.0)
    d = radial_from_unnormalized(prof, 1, support_radius=3.0, breakpoints=(1.0, 2.0))
    F = cumulative_profile(d)
    s = F(1.0)
    assert s == pytest.approx(0.5, abs=1e-9)
    assert F.inverse(s) <= 1.0 + 1e-9
    assert F.inverse(s + 1e-6) >= 2.0


def test_non_normalizable():
    from cutoffot.measures import RadialDensity

    bad = RadialDensity(dim=2, profile=lambda r: np.full(np.shape(r), 1.0), support_radius=1.0)
    with pytest.raises(NonNormalizable):
        cumulative_profile(bad)


def test_cutoff_examples(ref):
    d = gaussian(2)
    ball = cutoff(d, "ball", 2.0)
    assert ball.mass == pytest.approx(ref["cutoff_mass_ball_2"][0], abs=1e-10)
    cube = cutoff(d, "cube", 2.0)
    assert cube.mass == pytest.approx(ref["cutoff_mass_cube_2"][0], abs=1e-10)
    assert ball.mass < cube.mass < 1
    assert cutoff(d, "ball", math.inf).mass == 1.0
    assert cutoff(uniform_ball(2), "ball", 5.0).mass == 1.0
    assert ball.profile(2.0) == pytest.approx(1.0)
    assert ball.profile(1.0) == pytest.approx(gaussian2_cdf(1.0) / gaussian2_cdf(2.0), abs=1e-10)
    x = np.array([[2.5, 0.0], [0.0, 0.0], [1.9, 1.9]])
    assert ball.density(x)[0] == 0.0 and ball.density(x)[2] == 0.0
    assert cube.density(x)[2] > 0


def test_cutoff_renormalized_mass():
    from scipy import integrate

    d = gaussian(2)
    c = cutoff(d, "cube", 1.5)
    m, _ = integrate.dblquad(lambda y, x: float(c.density(np.array([x, y]))), -1.5, 1.5, -1.5, 1.5,
                             epsabs=1e-11)
    assert m == pytest.approx(1.0, abs=1e-8)


def test_empty_cutoff():
    narrow = radial_from_unnormalized(lambda r: np.exp(-0.5 * ((r - 50.0) / 0.5) ** 2), 2)
    with pytest.raises(EmptyCutoff):
        cutoff(narrow, "ball", 1.0)


def test_grid_density_cube_cutoff():
    g = gaussian_mixture()
    c = cutoff(g, "cube", 3.0)
    assert 0.99 < c.mass <= 1.0 + 1e-12
    with pytest.raises(ValueError):
        cutoff(g, "ball", 3.0)


def test_moments(ref):
    assert moment(gaussian(2), 2) == pytest.approx(ref["moment_gauss_2"][0], abs=1e-8)
    assert moment(pareto_tail(4), 4) == math.inf
    assert math.isfinite(moment(pareto_tail(4), 3))
    assert largest_finite_moment(pareto_tail(4)) == 3
    # (1 + r)^{-(n+3)}: the cubic moment diverges logarithmically
    d = radial_from_unnormalized(lambda r: (1.0 + r) ** -5.0, 2)
    assert moment(d, 3) == math.inf


def test_moment_of_narrow_bump_vanishes():
    vals = []
    for w in (0.1, 0.01, 0.001):
        d = radial_from_unnormalized(lambda r, w=w: np.exp(-0.5 * (r / w) ** 2), 2, scale=w)
        vals.append(moment(d, 2))
    assert vals[0] > vals[1] > vals[2] and vals[2] < 1e-5


def test_tail_mass(ref, profiles):
    assert tail_mass(profiles["gauss"], 2.0) == pytest.approx(ref["tail_gauss_2"][0], rel=1e-9)
    assert tail_mass(profiles["gauss"], 0.0) == 1.0
    assert tail_mass(profiles["disk"], 1.0) == 0.0
    assert tail_mass(profiles["gauss"], 8.0) == pytest.approx(math.exp(-32), rel=1e-6)


def test_pareto_tail_closed_form(profiles):
    F = profiles["pareto4"]
    for R in (1.0, 10.0, 100.0):
        assert F.tail(R) == pytest.approx((1 + R * R) ** -2.0, rel=1e-7)


def test_cube_mass_higher_dim_monte_carlo():
    d = gaussian(3)
    m = cube_mass(d, 1.0)
    assert m == pytest.approx(math.erf(1 / math.sqrt(2)) ** 3, abs=3e-3)


def test_density_from_name():
    assert density_from_name("pareto_tail(3)").name == "pareto_tail(3)"
    assert density_from_name("gaussian(2)", 3).dim == 3
    with pytest.raises(UnknownDensity):
        density_from_name("cauchy")


def test_logconcave_invariants():
    for lc in (gaussian_logconcave(2), exponential_logconcave(2), gaussian_logconcave(2).with_anchor(2.5)):
        assert lc.check_convexity()
        assert lc.check_anchor()
        F = cumulative_profile(lc.density)
        assert F(1e4) == pytest.approx(1.0, abs=1e-8)
    # e^{-phi} is the density itself
    lc = gaussian_logconcave(2)
    r = np.linspace(0, 4, 9)
    assert np.allclose(np.exp(-lc.potential(r)), lc.density(r), rtol=1e-12)


def test_bad_anchor():
    from cutoffot.errors import BadAnchor

    lc = gaussian_logconcave(2)
    with pytest.raises(BadAnchor):
        LogConcaveDensity(lc.density, lc.potential, (0.0, 0.0))


def test_line_profile_exponential():
    F = line_profile(lambda t: np.exp(-t), 0.0)
    assert F(math.log(2)) == pytest.approx(0.5, abs=1e-10)
    assert F.inverse(0.5) == pytest.approx(math.log(2), abs=1e-10)


def test_profile_table_export():
    tab = profile_table(gaussian(2), [0.0, 1.0])
    assert tab.shape == (2, 2) and tab[0, 1] == pytest.approx(1 / (2 * math.pi))


@settings(max_examples=40, deadline=None)
@given(a=st.floats(0.0, 6.0), b=st.floats(0.0, 6.0))
def test_monotone_profile_and_inverse(profiles, a, b):
    lo, hi = min(a, b), max(a, b)
    for key in ("gauss", "exp3", "pareto4"):
        F = profiles[key]
        assert F(lo) <= F(hi)
        assert F.inverse(F(lo)) <= F.inverse(F(hi))


@settings(max_examples=30, deadline=None)
@given(R1=st.floats(0.2, 5.0), R2=st.floats(0.2, 5.0))
def test_cutoff_nesting(R1, R2):
    d = PROFILES["gauss"]
    F = cumulative_profile(d)
    lo, hi = min(R1, R2), max(R1, R2)
    assert cutoff(d, "ball", lo, F=F).mass <= cutoff(d, "ball", hi, F=F).mass


@settings(max_examples=30, deadline=None)
@given(R=st.floats(1.0, 50.0), p=st.integers(1, 3))
def test_markov_dominance(profiles, R, p):
    for key in ("gauss", "pareto4"):
        M = moment(PROFILES[key], p)
        assert tail_mass(profiles[key], R) <= M * R ** (-p) * (1 + 1e-9)


@settings(max_examples=25, deadline=None)
@given(s=st.floats(0.0, 1.0))
def test_inverse_round_trip(profiles, s):
    F = profiles["exp3"]
    t = F.inverse(s)
    assert abs(F(t) - s) < 1e-10

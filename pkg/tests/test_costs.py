import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cutoffot.costs import builtin_cost
from cutoffot.errors import UnknownCost

NAMES = ["quadratic", "power_2", "power_4", "cosh_minus_one"]


def test_quadratic_value():
    c = builtin_cost("quadratic")
    assert c.h(2.0) == 2.0
    assert c(np.array([0.0, 0.0]), np.array([3.0, 4.0])) == pytest.approx(12.5)


def test_power4_growth_equality_case():
    c = builtin_cost("power_4")
    M, k = c.growth
    assert (M, k) == (4, 2)
    assert abs(c.h_prime(3.0)) == pytest.approx(27.0)
    assert abs(c.h_prime(3.0)) <= (M / 2**k) * 3.0 ** (2**k - 1) * (1 + 1e-15)


def test_cosh_strict_convexity():
    c = builtin_cost("cosh_minus_one")
    r = np.linspace(0, 20, 2001)
    h = c.h(r)
    assert np.all(h[2:] - 2 * h[1:-1] + h[:-2] > 0)
    assert c.growth is None


@pytest.mark.parametrize("name", NAMES)
def test_invariants_on_log_grid(name):
    c = builtin_cost(name)
    rep = c.check_invariants(r_max=50.0 if name == "cosh_minus_one" else 1e3)
    assert rep["zero_at_origin"] and rep["increasing"] and rep["strictly_convex"]
    assert rep["growth"] in (True, None)


def test_quadratic_growth_pair_is_consistent():
    # |h'(r)| = r must satisfy r <= (M/2) r, so M = 2 for k = 1
    c = builtin_cost("quadratic")
    assert c.growth == (2.0, 1)
    assert c.valid


def test_unknown_cost():
    with pytest.raises(UnknownCost):
        builtin_cost("abs")


@settings(max_examples=50, deadline=None)
@given(a=st.floats(0, 30), b=st.floats(0, 30))
def test_midpoint_convexity(a, b):
    for name in NAMES:
        c = builtin_cost(name)
        assert c.h(0.5 * (a + b)) <= 0.5 * (c.h(a) + c.h(b)) * (1 + 1e-12) + 1e-15

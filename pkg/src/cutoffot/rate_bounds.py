"""Explicit cutoff error bounds evaluated as numbers.

Each bound is a function of the cutoff radius R with named constants and a
validity threshold; measured errors from ``radial_ot`` are compared against them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple

import numpy as np

from .costs import CostFunction
from .errors import (
    BadAnchor,
    BoundaryPoint,
    HypothesisViolated,
    InfiniteMoment,
    NotBoundedBelow,
)
from .measures import (
    LogConcaveDensity,
    RadialDensity,
    _cube_fraction_2d,
    cumulative_profile,
    moment,
    sphere_area,
    subgradient,
)
from .radial_ot import radial_map, radial_potential


@dataclass
class RateBound:
    """A bound value(R) with its constants, applicable for R >= R0."""

    name: str
    func: Callable
    constants: dict = field(default_factory=dict)
    R0: float = 0.0

    def value(self, R):
        return self.func(np.asarray(R, dtype=float))

    def is_valid(self, R):
        return np.asarray(R, dtype=float) >= self.R0

    def __call__(self, R):
        """Bound value, or NaN where R is outside the validity range."""
        R = np.asarray(R, dtype=float)
        v = np.where(R >= self.R0, self.func(R), np.nan)
        return float(v) if v.ndim == 0 else v


def validity_radius(F_nu) -> float:
    """Smallest R with F_nu(R) >= 1/2."""
    return float(F_nu.inverse(0.5))


def _profiles(mu, nu, F_mu=None, F_nu=None):
    F_mu = F_mu if F_mu is not None else cumulative_profile(mu)
    F_nu = F_nu if F_nu is not None else cumulative_profile(nu)
    return F_mu, F_nu


# ---------------------------------------------------------------------------
# measured gaps (the quantities the bounds control)

def map_gap(mu, nu, r, R, F_mu=None, F_nu=None):
    """|S_R(r) - S(r)| for the map from nu (or its ball cutoff) to mu."""
    F_mu, F_nu = _profiles(mu, nu, F_mu, F_nu)
    T = radial_map(F_mu, F_nu, "nu_to_mu")
    TR = radial_map(F_mu, F_nu, "nu_to_mu", R=R)
    return np.abs(TR.scalar(r) - T.scalar(r))


def preimage_gap(mu, nu, y, R, F_mu=None, F_nu=None):
    """|q(y) - q_R(y)| where q maps mu-radii back to nu-radii."""
    F_mu, F_nu = _profiles(mu, nu, F_mu, F_nu)
    T = radial_map(F_mu, F_nu, "mu_to_nu")
    TR = radial_map(F_mu, F_nu, "mu_to_nu", R=R)
    return np.abs(T.scalar(y) - TR.scalar(y))


def potential_gap(cost, mu, nu, r, R, F_mu=None, F_nu=None):
    """|phi_R(r) - phi(r)| for the radial potentials h(|r - S(r)|)."""
    F_mu, F_nu = _profiles(mu, nu, F_mu, F_nu)
    phi = radial_potential(cost, radial_map(F_mu, F_nu, "nu_to_mu"))
    phiR = radial_potential(cost, radial_map(F_mu, F_nu, "nu_to_mu", R=R))
    return np.abs(phiR.radial(r) - phi.radial(r))


# ---------------------------------------------------------------------------
# bounds on maps and potentials

def map_error_bound_inverse(mu: RadialDensity, nu: RadialDensity, x_norm: float,
                            F_mu=None, F_nu=None) -> RateBound:
    """C(m, n, |x|) (1 - F_nu(R)) with C = 2 / (m |S^{n-1}| p(|x|)^{n-1})."""
    if mu.lower_bound_on is None:
        raise NotBoundedBelow("mu carries no positive lower bound")
    if not x_norm > 0:
        raise ValueError("x_norm must be positive")
    F_mu, F_nu = _profiles(mu, nu, F_mu, F_nu)
    m, tau = mu.lower_bound_on
    n = mu.dim
    p = float(F_mu.inverse(min(1.0, float(F_nu.evaluate(x_norm)))))
    if p > tau * (1 + 1e-12):
        raise NotBoundedBelow(f"lower bound holds on [0, {tau}] but p(|x|) = {p}")
    C = 2.0 / (m * sphere_area(n) * p ** (n - 1))
    return RateBound(
        "map_inverse",
        lambda R: C * F_nu.tail(R),
        {"m": m, "n": n, "p": p, "C": C, "x_norm": x_norm},
        validity_radius(F_nu),
    )


def _modulus_slope(F, y, samples=1000):
    t = np.linspace(0.0, y, samples + 1)
    v = F.evaluate(t)
    return float(np.max(np.diff(v) / np.diff(t)))


def preimage_error_bound(mu: RadialDensity, nu: RadialDensity, y_norm: float,
                         F_mu=None, F_nu=None, as_stated: bool = False,
                         use_modulus: bool | None = None) -> RateBound:
    """Bound on |q(y) - q_R(y)| for q = F_nu^{[-1]} o F_mu.

    The numerator is |S^{n-1}| M y^n, the Lipschitz bound of F_mu on [0, y]
    times y; ``as_stated=True`` drops the sphere factor (that variant is not a
    valid bound and is kept only for comparison). Without an upper bound M the
    numerator becomes omega(y (1 - F_nu(R))) with omega(s) = L s, L the largest
    sampled slope of F_mu on [0, y].
    """
    F_mu, F_nu = _profiles(mu, nu, F_mu, F_nu)
    if y_norm >= F_mu.support_radius or y_norm >= mu.support_radius:
        raise BoundaryPoint(f"y_norm={y_norm} is not interior to the support of mu")
    n = mu.dim
    area = sphere_area(n)
    q = lambda t: float(F_nu.inverse(min(1.0, float(F_mu.evaluate(t)))))
    qy, qh = q(y_norm), q(0.5 * y_norm)
    grid = np.linspace(0.0, qy, 1001)
    m_nu = float(np.min(nu(grid)))
    if not m_nu > 0:
        raise NotBoundedBelow("nu vanishes below q(y)")
    denom = m_nu * area * qh ** (n - 1) if qh > 0 else math.inf
    M = mu.upper_bound
    if use_modulus is None:
        use_modulus = M is None
    consts = {"m_nu": m_nu, "q_y": qy, "q_half": qh, "n": n, "y_norm": y_norm}
    if use_modulus:
        L = _modulus_slope(F_mu, y_norm)
        consts["L"] = L
        func = lambda R: L * y_norm * F_nu.tail(R) / denom
    else:
        lead = (1.0 if as_stated else area) * M * y_norm**n
        consts["M"] = M
        func = lambda R: lead * F_nu.tail(R) / denom
    return RateBound("preimage_as_stated" if as_stated else "preimage", func, consts,
                     validity_radius(F_nu))


def potential_error_bound_inverse(cost: CostFunction, mu: RadialDensity, nu: RadialDensity,
                                  x_norm: float, eps: float, F_mu=None, F_nu=None) -> RateBound:
    """2 M C_map gamma^(2^k - 1) (1 - F_nu(R)) with gamma = |x| + diam/2 + eps."""
    if cost.growth is None:
        raise HypothesisViolated(f"cost {cost.name} has no polynomial growth pair")
    if not eps > 0:
        raise ValueError("eps must be positive")
    F_mu, F_nu = _profiles(mu, nu, F_mu, F_nu)
    mb = map_error_bound_inverse(mu, nu, x_norm, F_mu, F_nu)
    M, k = cost.growth
    radius = mu.support_radius
    gamma = x_norm + radius + eps
    expo = 2**k - 1
    C = mb.constants["C"]
    R0 = mb.R0
    R1 = slack_radius(mu, nu, x_norm, eps, R0, F_mu, F_nu)
    return RateBound(
        "potential_inverse",
        lambda R: 2.0 * M * C * gamma**expo * F_nu.tail(R),
        {"M": M, "k": k, "gamma": gamma, "C_map": C, "R1": R1, "eps": eps},
        max(R0, R1),
    )


def slack_radius(mu, nu, x_norm, eps, R_start, F_mu=None, F_nu=None) -> float:
    """Smallest R >= R_start with measured map gap at |x| at most eps (gap decreases in R)."""
    F_mu, F_nu = _profiles(mu, nu, F_mu, F_nu)
    gap = lambda R: float(map_gap(mu, nu, x_norm, R, F_mu, F_nu))
    lo = R_start
    if gap(lo) <= eps:
        return lo
    hi = 2.0 * lo
    while gap(hi) > eps:
        lo, hi = hi, 2.0 * hi
        if hi > 1e8:
            return math.inf
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if gap(mid) <= eps:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-10 * hi:
            break
    return hi


# ---------------------------------------------------------------------------
# tails

def tail_bound_moment(nu: RadialDensity, p: int, R, M_p: float | None = None):
    """M_p R^{-p}, Markov's inequality with the ambient moment."""
    M_p = moment(nu, p) if M_p is None else M_p
    if not math.isfinite(M_p):
        raise InfiniteMoment(f"moment of order {p} is infinite")
    R = np.asarray(R, dtype=float)
    if np.any(R <= 0):
        raise ValueError("R must be positive")
    return M_p * R ** (-float(p))


def logconcave_tail_constant(lc: LogConcaveDensity) -> float:
    r0, y = lc.anchor
    if not y > 0:
        raise BadAnchor("anchor slope must be positive")
    n = lc.dim
    fact = math.factorial(n - 1)
    bracket = 1.0 + fact * (math.exp(y) - y ** (n - 1) / fact)
    return math.exp(y * r0 - float(lc.potential(r0))) * bracket / y**n


def tail_bound_logconcave(lc: LogConcaveDensity, R):
    """|S^{n-1}| C(y, r0, n) R^{n-1} e^{-yR}, valid for R >= 1."""
    R = np.asarray(R, dtype=float)
    if np.any(R < 1):
        raise ValueError("the log-concave tail bound needs R >= 1")
    C = logconcave_tail_constant(lc)
    y = lc.anchor[1]
    out = sphere_area(lc.dim) * C * R ** (lc.dim - 1) * np.exp(-y * R)
    return float(out) if out.ndim == 0 else out


def optimize_anchor(lc: LogConcaveDensity, R_target: float, r0_grid=None, bound=None) -> LogConcaveDensity:
    """Grid search over anchor points r0, slope = numeric subgradient, minimizing the bound at R_target."""
    r0_grid = np.linspace(0.1, 5.0, 50) if r0_grid is None else np.asarray(r0_grid)
    bound = bound or tail_bound_logconcave
    best, best_val = lc, math.inf
    for r0 in r0_grid:
        y = subgradient(lc.potential, r0)
        if not y > 0:
            continue
        cand = LogConcaveDensity(lc.density, lc.potential, (float(r0), y))
        val = float(bound(cand, R_target))
        if val < best_val:
            best, best_val = cand, val
    return best


# ---------------------------------------------------------------------------
# W1 between nu and its cutoff

def _cube_tail_pieces(nu: RadialDensity, R: float, tol=1e-10):
    F = cumulative_profile(nu, tol)
    if nu.dim == 1:
        return F.integrate_beyond(lambda t: np.asarray(t), R), float(F.tail(R))
    if nu.dim != 2:
        raise NotImplementedError("cube bounds are implemented for n <= 2")
    outside = lambda t: 1.0 - _cube_fraction_2d(t, R)
    first = F.integrate_beyond(lambda t: np.asarray(t) * outside(t), 0.0) - 0.0
    mass = F.integrate_beyond(outside, 0.0)
    return first, mass


def w1_cutoff_bound(nu: RadialDensity, shape: str, R: float, F=None, tol=1e-10) -> float:
    """First moment of the removed region plus (radius of the region) x (removed mass)."""
    if shape == "ball":
        F = F if F is not None else cumulative_profile(nu, tol)
        first = F.integrate_beyond(lambda t: np.asarray(t), R, tol)
        return float(first + R * F.tail(R))
    if shape == "cube":
        first, mass = _cube_tail_pieces(nu, R, tol)
        return float(first + math.sqrt(nu.dim) * R * mass)
    raise ValueError(f"unknown shape {shape!r}")


def w1_moment_bound(nu: RadialDensity, p: int, R, M_p: float | None = None):
    """2 M_p R^{1-p}."""
    if p < 2:
        raise HypothesisViolated("the moment bound needs p >= 2")
    M_p = moment(nu, p) if M_p is None else M_p
    if not math.isfinite(M_p):
        raise InfiniteMoment(f"moment of order {p} is infinite")
    R = np.asarray(R, dtype=float)
    out = 2.0 * M_p * R ** (1.0 - p)
    return float(out) if out.ndim == 0 else out


def w1_logconcave_constant(a: float, b: float, n: int) -> float:
    if not a > 0:
        raise BadAnchor("linear lower bound slope a must be positive")
    s1 = sum(math.factorial(n) / (a**k * math.factorial(n - k + 1)) for k in range(1, n + 2))
    s2 = sum(math.factorial(n - 1) / (a**k * math.factorial(n - k)) for k in range(1, n + 1))
    return (s1 + s2) * sphere_area(n) * math.exp(-b)


def w1_logconcave_bound(lc: LogConcaveDensity, R, shape: str = "ball"):
    """C(a, b, n) R^n e^{-aR}; the cube variant shares the constant."""
    if shape not in ("ball", "cube"):
        raise ValueError(f"unknown shape {shape!r}")
    R = np.asarray(R, dtype=float)
    if np.any(R < 1):
        raise ValueError("the log-concave W1 bound needs R >= 1")
    a, b = lc.linear_bound
    C = w1_logconcave_constant(a, b, lc.dim)
    out = C * R**lc.dim * np.exp(-a * R)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# L2 rates from W1

class L2Rate(NamedTuple):
    map_exponent: Fraction
    potential_exponent: Fraction
    map_value: float
    potential_value: float


def l2_rate_bound(w1_value: float, p: int, n: int) -> L2Rate:
    """Exponents p/(6p+16n) (maps) and 1/2 (potentials); constants are a free scale."""
    if p <= n or p < 4:
        raise HypothesisViolated(f"need p > n and p >= 4, got p={p}, n={n}")
    e_map = Fraction(p, 6 * p + 16 * n)
    e_pot = Fraction(1, 2)
    w = max(float(w1_value), 0.0)
    return L2Rate(e_map, e_pot, w ** float(e_map), w ** float(e_pot))

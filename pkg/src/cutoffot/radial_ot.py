"""Exact radial optimal transport maps and potentials.

For radial measures the optimal map moves each point along its ray, with the
scalar map given by composing one CDF with the generalized inverse of the other.
"""
from __future__ import annotations

import math

import numpy as np

from .costs import CostFunction
from .errors import DimensionMismatch, DivergentIntegral
from .measures import (
    CumulativeProfile,
    CutoffMeasure,
    RadialDensity,
    TruncatedProfile,
    cumulative_profile,
)
from .quadrature import gauss_partial, integrate_tail, simpson_panels

DIRECTIONS = ("nu_to_mu", "mu_to_nu")


def monotone_rearrangement_1d(F, G):
    """Return the increasing map T = G^{[-1]} o F between two 1D laws."""

    def T(x):
        s = np.clip(F.evaluate(x), 0.0, 1.0)
        return G.inverse(s)

    return T


def _as_profile(d, tol=1e-10):
    if isinstance(d, (CumulativeProfile, TruncatedProfile)):
        return d
    if isinstance(d, CutoffMeasure):
        if d.shape != "ball" or d.profile is None:
            raise ValueError("only ball cutoffs of radial densities have a radial profile")
        return d.profile
    if isinstance(d, RadialDensity):
        return cumulative_profile(d, tol)
    raise TypeError(f"cannot build a radial profile from {type(d).__name__}")


class RadialMap:
    """Scalar radial map S with full map x -> S(|x|) x/|x| and S(0) = 0."""

    def __init__(self, source_cdf, target_cdf, direction: str):
        if direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}")
        if source_cdf.dim is not None and target_cdf.dim is not None and source_cdf.dim != target_cdf.dim:
            raise DimensionMismatch(f"dimensions {source_cdf.dim} and {target_cdf.dim} differ")
        self.source_cdf = source_cdf
        self.target_cdf = target_cdf
        self.direction = direction
        self.dim = source_cdf.dim

    def scalar(self, r):
        r = np.asarray(r, dtype=float)
        s = np.clip(self.source_cdf.evaluate(r), 0.0, 1.0)
        out = np.asarray(self.target_cdf.inverse(s), dtype=float)
        out = np.where(r <= 0.0, 0.0, out)
        return float(out) if out.ndim == 0 else out

    S = scalar

    def __call__(self, x):
        """Full map on points of shape (..., n)."""
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x, axis=-1)
        s = self.scalar(r)
        with np.errstate(invalid="ignore", divide="ignore"):
            scale = np.where(r > 0, s / np.where(r > 0, r, 1.0), 0.0)
        return x * scale[..., None]

    def inverse_map(self) -> "RadialMap":
        other = "mu_to_nu" if self.direction == "nu_to_mu" else "nu_to_mu"
        return RadialMap(self.target_cdf, self.source_cdf, other)


def radial_map(mu, nu, direction: str = "nu_to_mu", R: float | None = None, tol: float = 1e-10) -> RadialMap:
    """Optimal radial map between radial laws ``mu`` (on the bounded domain) and ``nu``.

    ``nu_to_mu`` gives S = F_mu^{[-1]} o F_nu; ``mu_to_nu`` the reverse. When ``R``
    is given, ``nu`` is replaced by its ball cutoff at radius R.
    """
    Fm = _as_profile(mu, tol)
    Fn = _as_profile(nu, tol)
    if Fm.dim is not None and Fn.dim is not None and Fm.dim != Fn.dim:
        raise DimensionMismatch(f"dimensions {Fm.dim} and {Fn.dim} differ")
    if R is not None and math.isfinite(R):
        Fn = Fn.truncate(R)
    if direction == "nu_to_mu":
        return RadialMap(Fn, Fm, direction)
    if direction == "mu_to_nu":
        return RadialMap(Fm, Fn, direction)
    raise ValueError(f"direction must be one of {DIRECTIONS}")


class RadialPotential:
    """phi(x) = h(| |x| - S(|x|) |) with additive constant 0."""

    def __init__(self, cost: CostFunction, rmap: RadialMap):
        self.cost = cost
        self.map = rmap
        self.constant = 0.0

    def radial(self, r):
        r = np.asarray(r, dtype=float)
        return self.cost.h(np.abs(r - self.map.scalar(r))) + self.constant

    def __call__(self, x):
        return self.radial(np.linalg.norm(np.asarray(x, dtype=float), axis=-1))

    def gradient(self, x, step=1e-6):
        """Chain-rule gradient h'(|r-S|) sgn(r-S) (1 - S'(r)) x/|x|, S' by central differences."""
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x, axis=-1)
        S = self.map.scalar
        d = r - S(r)
        dS = (S(r + step) - S(np.maximum(r - step, 0.0))) / (r + step - np.maximum(r - step, 0.0))
        g = self.cost.h_prime(np.abs(d)) * np.sign(d) * (1.0 - dS)
        with np.errstate(invalid="ignore", divide="ignore"):
            unit = np.where(r[..., None] > 0, x / np.where(r > 0, r, 1.0)[..., None], 0.0)
        return unit * np.asarray(g)[..., None]


def radial_potential(cost: CostFunction, rmap: RadialMap) -> RadialPotential:
    return RadialPotential(cost, rmap)


class IntegratedRadialField:
    """u(r) = int_0^r g(t) dt for a radial integrand g, tabulated on the map's source grid.

    Brenier (convex) potentials use g = S; c-concave potentials of a general cost
    use g = h'(|t - S(t)|) sgn(t - S(t)), whose gradient is x - T(x) for the
    quadratic cost.
    """

    def __init__(self, integrand, grid, top=None):
        self.g = integrand
        grid = np.asarray(grid, dtype=float)
        if top is not None:
            grid = np.append(grid[grid < top], top)
        self.grid = grid
        panels = gauss_partial(integrand, grid[:-1], grid[1:])
        self.cum = np.concatenate([[0.0], np.cumsum(panels)])
        self.offset = 0.0

    def radial(self, r):
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        k = np.clip(np.searchsorted(self.grid, r, side="right") - 1, 0, len(self.grid) - 2)
        out = self.cum[k] + gauss_partial(self.g, self.grid[k], r) + self.offset
        return float(out[0]) if scalar else out

    def __call__(self, x):
        return self.radial(np.linalg.norm(np.asarray(x, dtype=float), axis=-1))

    def shifted(self, c: float) -> "IntegratedRadialField":
        new = object.__new__(IntegratedRadialField)
        new.__dict__.update(self.__dict__)
        new.offset = self.offset + c
        return new


def _potential_grid(rmap: RadialMap, r_max: float | None):
    F = rmap.source_cdf
    top = F.support_radius if r_max is None else min(r_max, F.support_radius)
    if not math.isfinite(top):
        top = 50.0
    grid = np.asarray(F.grid, dtype=float)
    grid = np.unique(np.concatenate([grid[grid < top], np.linspace(0.0, top, 801)]))
    return grid, top


def brenier_potential(rmap: RadialMap, r_max: float | None = None) -> IntegratedRadialField:
    """Convex potential u with grad u = T and u(0) = 0 (quadratic cost)."""
    grid, top = _potential_grid(rmap, r_max)
    return IntegratedRadialField(rmap.scalar, grid, top)


def kantorovich_potential(cost: CostFunction, rmap: RadialMap, r_max: float | None = None) -> IntegratedRadialField:
    """c-concave potential phi with phi(0) = 0 and grad phi(x) = grad_x c(x, T(x))."""
    S = rmap.scalar

    def g(t):
        d = np.asarray(t) - S(t)
        return cost.h_prime(np.abs(d)) * np.sign(d)

    grid, top = _potential_grid(rmap, r_max)
    return IntegratedRadialField(g, grid, top)


def w2_from_profiles(F_src, F_tgt, tol: float = 1e-10) -> float:
    """W2 between two 1D laws through their monotone map, integrated against F_src."""
    T = monotone_rearrangement_1d(F_src, F_tgt)
    g = lambda t: (np.asarray(t) - T(t)) ** 2
    val = F_src.integrate(g, tol=tol)
    if not math.isfinite(val):
        raise DivergentIntegral("W2 integral diverged")
    return math.sqrt(max(val, 0.0))


def w2_radial(mu, nu, R: float | None = None, tol: float = 1e-10) -> float:
    """W2(mu, nu) (or W2(mu, nu_R)) computed from the exact radial map."""
    Fm = _as_profile(mu, tol)
    Fn = _as_profile(nu, tol)
    if R is not None and math.isfinite(R):
        Fn = Fn.truncate(R)
    return w2_from_profiles(Fn, Fm, tol)


def w1_exact_radial(nu, nu_R, tol: float = 1e-10) -> float:
    """int_0^inf |F_nu - F_{nu_R}| dt for the radial laws of nu and its ball cutoff."""
    Fn = _as_profile(nu, tol)
    FR = _as_profile(nu_R, tol)
    if isinstance(FR, TruncatedProfile):
        R = FR.R
        if R >= Fn.support_radius:
            return 0.0
        mass = FR.mass
        first_below = Fn.integrate(lambda t: np.asarray(t), upper=R, tol=tol)
        excess = Fn.integrate_beyond(lambda t: np.asarray(t) - R, R, tol=tol)
        tail = Fn.tail(R)
        # F_R >= F below R, F_R = 1 above: two one-signed pieces
        return float((tail / mass) * (R * mass - first_below) + excess)
    return w1_profiles(Fn, FR, tol)


def w1_profiles(F, G, tol: float = 1e-10) -> float:
    """int |F - G| over the union of both support grids."""
    grid = np.unique(np.concatenate([F.grid, G.grid]))
    lo = min(F.lo, G.lo)
    grid = grid[grid >= lo]
    f = lambda t: np.abs(F.evaluate(t) - G.evaluate(t))
    total = float(simpson_panels(f, grid, tol).sum())
    if F.support_radius == math.inf or G.support_radius == math.inf:
        total += integrate_tail(lambda t: np.abs(F.tail(t) - G.tail(t)), grid[-1], tol)
    return total


def map_trace(rmap: RadialMap, potential, r) -> np.ndarray:
    """Rows (r, S(r), phi(r)) for CSV export."""
    r = np.asarray(r, dtype=float)
    return np.column_stack([r, rmap.scalar(r), potential.radial(r)])

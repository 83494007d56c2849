"""Independent reference computations used by the tests.

Nothing here reuses the package's own quadrature or inversion code: integrals
go through scipy.integrate.quad, inverses through scipy.optimize.brentq, and
many values are closed forms.
"""
from __future__ import annotations

import csv
import math
import os
import sys
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .errors import DivergentIntegral, LengthMismatch, UnknownCase


# ---------------------------------------------------------------------------
# 1D transport

def discrete_ot_1d(samples_F, samples_G) -> np.ndarray:
    """Pair the i-th order statistic of one sample with the i-th of the other."""
    a = np.sort(np.asarray(samples_F, dtype=float))
    b = np.sort(np.asarray(samples_G, dtype=float))
    if a.shape != b.shape:
        raise LengthMismatch(f"{len(a)} vs {len(b)} samples")
    return np.column_stack([a, b])


def w1_exact_1d(F: Callable, G: Callable, lo: float = 0.0, hi: float = math.inf,
                breakpoints=()) -> float:
    """int |F - G| dt by scipy quadrature."""
    pts = sorted(p for p in breakpoints if lo < p < hi)
    edges = [lo] + pts + [hi]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, err = integrate.quad(lambda t: abs(F(t) - G(t)), a, b, limit=400, epsabs=1e-13, epsrel=1e-12)
        if not math.isfinite(val):
            raise DivergentIntegral("W1 integral diverged")
        total += val
    return total


def quad_cdf(profile: Callable, n: int, t: float) -> float:
    """|S^{n-1}| int_0^t f(r) r^{n-1} dr by scipy quadrature."""
    area = 2 * math.pi ** (n / 2) / math.gamma(n / 2)
    val, _ = integrate.quad(lambda r: area * profile(r) * r ** (n - 1), 0.0, t, limit=400,
                            epsabs=1e-14, epsrel=1e-13)
    return val


def quad_quantile(cdf: Callable, s: float, lo: float = 0.0, hi: float = 1.0) -> float:
    """Smallest t with cdf(t) = s, bracketed by doubling then brentq."""
    if s <= 0:
        return lo
    while cdf(hi) < s:
        hi *= 2.0
    return optimize.brentq(lambda t: cdf(t) - s, lo, hi, xtol=1e-15, rtol=1e-15)


# closed forms for the reference radial pair: standard Gaussian and uniform unit disk in R^2
def gaussian2_cdf(t):
    return 1.0 - np.exp(-0.5 * np.asarray(t, dtype=float) ** 2)


def gaussian2_tail(t):
    return np.exp(-0.5 * np.asarray(t, dtype=float) ** 2)


def gaussian2_quantile(s):
    return np.sqrt(-2.0 * np.log1p(-np.asarray(s, dtype=float)))


def disk_cdf(t):
    return np.clip(np.asarray(t, dtype=float), 0.0, 1.0) ** 2


def disk_quantile(s):
    return np.sqrt(np.asarray(s, dtype=float))


def gaussian_to_disk(r, R=math.inf):
    """Closed-form radial map from the (cutoff) 2D Gaussian to the unit disk."""
    F = gaussian2_cdf(r)
    if math.isfinite(R):
        F = np.minimum(F / gaussian2_cdf(R), 1.0)
    return disk_quantile(F)


def disk_to_gaussian(y, R=math.inf):
    s = disk_cdf(y)
    if math.isfinite(R):
        s = s * gaussian2_cdf(R)
    return gaussian2_quantile(s)


def quantile_samples(quantile: Callable, N: int) -> np.ndarray:
    """Deterministic N-point quantile sample at levels (i - 1/2)/N."""
    return quantile((np.arange(N) + 0.5) / N)


# ---------------------------------------------------------------------------
# finite differences

def fd_gradient_check(f: Callable, point, h_fd: float = 1e-5, grad: Callable | None = None) -> dict:
    """Central-difference gradient of a scalar field, optionally compared with ``grad``."""
    x = np.asarray(point, dtype=float)
    g = np.empty_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h_fd
        g[i] = (float(f(x + e)) - float(f(x - e))) / (2 * h_fd)
    report = {"gradient": g, "max_deviation": None}
    if grad is not None:
        ref = np.asarray(grad(x), dtype=float)
        report["reference"] = ref
        report["max_deviation"] = float(np.max(np.abs(g - ref)))
    return report


# ---------------------------------------------------------------------------
# manufactured Monge-Ampere solutions

@dataclass(frozen=True)
class ManufacturedCase:
    """Convex u* on the rectangle X with f0 = f1(grad u*) det D^2 u* and target Y = grad u*(X)."""

    name: str
    u: Callable
    grad: Callable
    det_hessian: Callable
    X: tuple
    Y: tuple
    f1: float

    def f0(self, x, y):
        pts = np.stack([np.asarray(x, dtype=float), np.asarray(y, dtype=float)], axis=-1)
        return self.f1 * self.det_hessian(pts)

    def mass_gap(self) -> float:
        """|int_X f0 - int_Y f1| by scipy quadrature."""
        (a1, a2), (b1, b2) = self.X
        m0, _ = integrate.dblquad(lambda y, x: float(self.f0(x, y)), a1, b1, a2, b2, epsabs=1e-12)
        (c1, c2), (d1, d2) = self.Y
        return abs(m0 - self.f1 * (d1 - c1) * (d2 - c2))


def make_manufactured(name: str) -> ManufacturedCase:
    key = name.replace(" ", "")
    X = ((0.0, 0.0), (1.0, 1.0))
    if key == "identity":
        return ManufacturedCase(
            "identity",
            u=lambda p: 0.5 * np.sum(np.asarray(p) ** 2, axis=-1),
            grad=lambda p: np.asarray(p, dtype=float),
            det_hessian=lambda p: np.ones(np.asarray(p).shape[:-1]),
            X=X, Y=((0.0, 0.0), (1.0, 1.0)), f1=1.0)
    if key in ("affine_diag", "affine_diag(2,0.5)"):
        return ManufacturedCase(
            "affine_diag(2,0.5)",
            u=lambda p: np.asarray(p)[..., 0] ** 2 + 0.25 * np.asarray(p)[..., 1] ** 2,
            grad=lambda p: np.asarray(p, dtype=float) * np.array([2.0, 0.5]),
            det_hessian=lambda p: np.ones(np.asarray(p).shape[:-1]),
            X=X, Y=((0.0, 0.0), (2.0, 0.5)), f1=1.0)
    if key == "quartic_bump":
        return ManufacturedCase(
            "quartic_bump",
            u=lambda p: 0.5 * np.sum(np.asarray(p) ** 2, axis=-1) + 0.05 * np.sum(np.asarray(p) ** 4, axis=-1),
            grad=lambda p: np.asarray(p) + 0.2 * np.asarray(p) ** 3,
            det_hessian=lambda p: np.prod(1.0 + 0.6 * np.asarray(p) ** 2, axis=-1),
            X=X, Y=((0.0, 0.0), (1.2, 1.2)), f1=1.0 / 1.44)
    raise UnknownCase(name)


# ---------------------------------------------------------------------------
# fixtures

def fixture_rows():
    """(name, value, tolerance, generator) rows of reference values."""
    rows = []
    add = lambda name, value, tol, gen: rows.append((name, repr(float(value)), repr(tol), gen))
    g1 = gaussian2_cdf(1.0)
    g2 = gaussian2_cdf(2.0)
    add("gaussian2_cdf_1", g1, 1e-9, "closed form 1-exp(-t^2/2)")
    add("disk_cdf_half", 0.25, 1e-9, "closed form t^2")
    add("map_gauss_disk_1", gaussian_to_disk(1.0), 1e-9, "closed form sqrt(F_nu)")
    add("map_gauss_disk_1_R2", gaussian_to_disk(1.0, 2.0), 1e-9, "closed form sqrt(F_nu/F_nu(R))")
    add("potential_quadratic_1", 0.5 * (1.0 - gaussian_to_disk(1.0)) ** 2, 1e-9, "closed form h(|r-S(r)|)")
    add("cutoff_mass_ball_2", g2, 1e-9, "closed form")
    add("cutoff_mass_cube_2", math.erf(2 / math.sqrt(2)) ** 2, 1e-9, "erf^2 tensor form")
    add("tail_gauss_2", math.exp(-2.0), 1e-12, "closed form")
    add("moment_gauss_2", 2.0, 1e-9, "E|X|^2 for the planar standard normal")
    add("exp_quantile_half", -math.log(0.5), 1e-9, "closed form -log(1-s)")
    # W2 between the 2D Gaussian and the disk via quantile functions
    w2sq, _ = integrate.quad(lambda s: (gaussian2_quantile(s) - disk_quantile(s)) ** 2, 0, 1, limit=400,
                             epsabs=1e-13)
    add("w2_gauss_disk", math.sqrt(w2sq), 1e-7, "scipy quad of squared quantile gap")
    # W1 between Exp(1) and its cutoff at 2
    FR = lambda t: min((1 - math.exp(-t)) / (1 - math.exp(-2.0)), 1.0)
    add("w1_exp_cutoff_2", w1_exact_1d(lambda t: 1 - math.exp(-t), FR, 0, math.inf, (2.0,)), 1e-9,
        "scipy quad of |F - F_R|")
    # W1 between the Gaussian radial law and its ball cutoff at 2
    FRg = lambda t: min(gaussian2_cdf(t) / g2, 1.0)
    add("w1_gauss_cutoff_2", w1_exact_1d(lambda t: float(gaussian2_cdf(t)), FRg, 0, math.inf, (2.0,)), 1e-9,
        "scipy quad of |F - F_R|")
    # ball W1 cutoff bound for the Gaussian at R = 2
    first, _ = integrate.quad(lambda r: r * r * math.exp(-r * r / 2), 2.0, math.inf, epsabs=1e-14)
    add("w1_cutoff_bound_ball_gauss_2", first + 2 * math.exp(-2.0), 1e-9, "scipy quad")
    # map bound constants
    p1 = gaussian_to_disk(1.0)
    C = 2.0 / ((1 / math.pi) * 2 * math.pi * p1)
    add("map_bound_C_x1", C, 1e-9, "2/(m |S| p)")
    add("map_bound_x1_R2", C * math.exp(-2.0), 1e-9, "C (1 - F_nu(2))")
    add("map_gap_x1_R2", gaussian_to_disk(1.0, 2.0) - gaussian_to_disk(1.0), 1e-9, "closed form")
    add("validity_radius_gauss", math.sqrt(2 * math.log(2)), 1e-9, "F_nu(R0) = 1/2")
    add("preimage_gap_y05_R2", disk_to_gaussian(0.5) - disk_to_gaussian(0.5, 2.0), 1e-9, "closed form")
    add("logconcave_tail_C", math.exp(1.5) / (2 * math.pi), 1e-12, "e^{y r0 - phi(r0)} (1 + e - 1)/1")
    add("logconcave_tail_bound_2", 2 * math.pi * math.exp(1.5) / (2 * math.pi) * 2 * math.exp(-2), 1e-12,
        "|S| C R e^{-R}")
    add("w1_logconcave_C_gauss", 7 * math.exp(0.5), 1e-12, "(5 + 2) |S| e^{-b}, b = log(2 pi) - 1/2")
    add("envelope_bound_h001", (0.01 / (math.pi / 7.5)) ** (0.5 / 2.5), 1e-12,
        "C_H (h/beta)^{alpha/(alpha+n)}, beta = pi/7.5")
    add("map_exponent_5_2", 5 / 62, 1e-15, "p/(6p+16n)")
    return rows


def write_fixtures(directory: str) -> list:
    """Write reference CSVs and a manifest listing generator, seed and tolerance."""
    os.makedirs(directory, exist_ok=True)
    rows = fixture_rows()
    path = os.path.join(directory, "reference_values.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["name", "value", "tolerance", "generator"])
        w.writerows(rows)
    qpath = os.path.join(directory, "quantile_pairs.csv")
    N = 10_000
    xs = quantile_samples(gaussian2_quantile, N)
    ys = quantile_samples(disk_quantile, N)
    with open(qpath, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y"])
        for a, b in discrete_ot_1d(xs, ys):
            w.writerow([repr(float(a)), repr(float(b))])
    with open(os.path.join(directory, "manifest.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["file", "generator", "seed", "tolerance"])
        w.writerow(["reference_values.csv", "cutoffot.oracles.fixture_rows", "none", "per row"])
        w.writerow(["quantile_pairs.csv", "cutoffot.oracles.discrete_ot_1d on closed-form quantiles",
                    "none", "2e-4"])
    return [path, qpath]


if __name__ == "__main__":  # pragma: no cover
    write_fixtures(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures")

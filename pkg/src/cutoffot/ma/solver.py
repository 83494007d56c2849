"""Iterative solution of the discrete scheme and grid-function utilities."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..errors import NoConvergence
from . import kernels
from .grid import Grid
from .scheme import Problem, SchemeConfig


@dataclass
class MASolution:
    """Mean-zero grid potential with its solve diagnostics.

    At convergence the residual equals the constant ``-c`` on every node; ``c``
    absorbs the discrete mass imbalance between source and target.
    """

    grid: Grid
    u: np.ndarray
    c: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list)
    max_abs: list = field(default_factory=list)
    newton_steps: int = 0
    euler_steps: int = 0
    wall_time: float = 0.0
    backend: str = kernels.BACKEND

    def values(self) -> np.ndarray:
        return self.u.reshape(self.grid.shape)

    def gradient(self) -> np.ndarray:
        """Second-order finite-difference gradient, shape (n1, n2, 2)."""
        gx, gy = np.gradient(self.values(), self.grid.h, self.grid.h, edge_order=2)
        return np.stack([gx, gy], axis=-1)

    def extend(self, x):
        return extend_nearest_neighbor(self.u, self.grid, x)


def _oscillation(r):
    return 0.5 * (float(np.max(r)) - float(np.min(r)))


def _initial_guess(grid: Grid, target) -> np.ndarray:
    """Separable quadratic whose gradient maps the grid rectangle affinely onto the target's bounding box."""
    lo, hi = target.bounds
    pts = grid.points()
    u = np.zeros(len(pts))
    for i in range(2):
        a, b = grid.lower[i], grid.upper[i]
        s = (hi[i] - lo[i]) / (b - a)
        x = pts[:, i]
        u += 0.5 * s * (x - a) ** 2 + lo[i] * x
    return u - u.mean()


def _euler(prob: Problem, u, steps, cfl, dt_fixed=None):
    h = prob.grid.h
    for _ in range(steps):
        r, (branch, dd, _) = prob.residual(u, full=True)
        if dt_fixed is None:
            f1 = prob.f1_values(u)
            amax = float(np.max(np.maximum(dd, 0.0))) if dd.size else 0.0
            dt = cfl * h * h / (1.0 + float(np.max(f1)) * amax)
        else:
            dt = dt_fixed
        u = u - dt * (r - r.mean())
        u -= u.mean()
    return u


def solve_scheme(f0, f1, target, grid: Grid, cfg: SchemeConfig | None = None, u0=None,
                 raise_on_failure: bool = True) -> MASolution:
    """Solve the scheme for a mean-zero grid potential.

    Damped semismooth Newton on the system R(u) + c = 0, mean(u) = 0; when a
    Newton direction fails to reduce the residual oscillation, a block of
    explicit steps u <- u - dt (R(u) - mean R(u)) is taken instead.
    """
    t0 = time.perf_counter()
    cfg = cfg or SchemeConfig(width=grid.width)
    prob = Problem(grid, f0, f1, target, cfg)
    N = grid.size
    u = _initial_guess(grid, target) if u0 is None else np.asarray(u0, dtype=float).ravel().copy()
    u -= u.mean()
    scale = max(1.0, float(np.max(np.abs(prob.f0))))
    tol = cfg.residual_tol * scale
    r, info = prob.residual(u, full=True)
    merit = _oscillation(r)
    history, max_abs = [merit], [float(np.max(np.abs(u)))]
    ones = np.ones((N, 1))
    row = sp.csr_matrix(np.full((1, N), 1.0 / N))
    newton_steps = euler_steps = 0
    it = 0
    while it < cfg.max_iters and merit > tol:
        it += 1
        accepted = False
        if cfg.newton:
            J = prob.jacobian(u, info)
            A = sp.bmat([[J, sp.csr_matrix(ones)], [row, None]], format="csc")
            rhs = np.concatenate([-r, [-u.mean()]])
            try:
                sol = spla.spsolve(A, rhs)
                du = sol[:N]
                ok = np.all(np.isfinite(du))
            except (RuntimeError, ValueError):
                ok = False
            tau = 1.0
            while ok and tau >= 1.0 / 64:
                un = u + tau * du
                un -= un.mean()
                rn, infon = prob.residual(un, full=True)
                mn = _oscillation(rn)
                if mn < (1.0 - 1e-4 * tau) * merit:
                    u, r, info, merit = un, rn, infon, mn
                    accepted = True
                    newton_steps += 1
                    break
                tau *= 0.5
        if not accepted:
            u = _euler(prob, u, cfg.euler_steps, cfg.cfl, cfg.dt)
            euler_steps += cfg.euler_steps
            r, info = prob.residual(u, full=True)
            merit = _oscillation(r)
        history.append(merit)
        max_abs.append(float(np.max(np.abs(u))))
    converged = merit <= tol
    c = -float(0.5 * (np.max(r) + np.min(r)))
    sol = MASolution(grid, u, c, it, converged, history, max_abs, newton_steps, euler_steps,
                     time.perf_counter() - t0, kernels.BACKEND)
    if not converged and raise_on_failure:
        raise NoConvergence(it, merit)
    return sol


def extend_nearest_neighbor(u, grid: Grid, x) -> np.ndarray:
    """Piecewise-constant extension: sup of u over the nearest grid nodes (ties included)."""
    U = np.asarray(u, dtype=float).reshape(grid.shape)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    h = grid.h
    lo = np.asarray(grid.lower)
    s = (x - lo) / h
    base = np.floor(s).astype(np.intp)
    best_d = np.full(len(x), np.inf)
    best_v = np.full(len(x), -np.inf)
    cand = []
    for di in (0, 1):
        for dj in (0, 1):
            ii = np.clip(base[:, 0] + di, 0, grid.shape[0] - 1)
            jj = np.clip(base[:, 1] + dj, 0, grid.shape[1] - 1)
            d = np.hypot(s[:, 0] - ii, s[:, 1] - jj)
            cand.append((d, U[ii, jj]))
    for d, _ in cand:
        best_d = np.minimum(best_d, d)
    for d, v in cand:
        tie = d <= best_d + 1e-12
        best_v = np.where(tie, np.maximum(best_v, v), best_v)
    return best_v if best_v.size > 1 else float(best_v[0])

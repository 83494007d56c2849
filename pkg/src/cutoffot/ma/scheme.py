"""Monotone wide-stencil discretization of the second boundary-value problem.

Interior nodes carry max{-f1 det_h + f0, -lambda1_h}; boundary nodes carry an
upwind discretization of the signed distance H(grad u) to the target set. Both
are shifted down by delta(h) so that the scheme underestimates.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import kernels
from .grid import Grid, discrete_normals


@dataclass
class SchemeConfig:
    gamma: float = 2.0
    dt: float | None = None
    cfl: float = 0.1
    residual_tol: float = 1e-8
    max_iters: int = 300
    width: int = 5
    n_normals: int = 64
    newton: bool = True
    jac_floor: float = 1e-3
    euler_steps: int = 200

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be positive")

    def delta(self, h: float) -> float:
        return float(h) ** self.gamma


class Problem:
    """Grid, densities, target domain and precomputed stencil data."""

    def __init__(self, grid: Grid, f0, f1, target, cfg: SchemeConfig | None = None):
        self.grid = grid
        self.cfg = cfg or SchemeConfig(width=grid.width)
        pts = grid.points()
        self.points = pts
        self.f0 = np.asarray(f0(pts[:, 0], pts[:, 1]) if callable(f0) else f0, dtype=float).ravel()
        if self.f0.shape != (grid.size,):
            raise ValueError("f0 must provide one value per grid node")
        if np.any(self.f0 < 0):
            raise ValueError("f0 must be nonnegative")
        self.f1 = f1
        self.target = target
        self.st = grid.stencils()
        self.normals = discrete_normals(self.cfg.n_normals)
        self.sigma = np.ascontiguousarray(target.support(self.normals))
        self.nbrs = np.ascontiguousarray(grid.neighbours())
        self.delta = self.cfg.delta(grid.h)
        self.f0_int = np.ascontiguousarray(self.f0[grid.interior])

    # -- pieces ------------------------------------------------------------
    def centered_gradient(self, u):
        n1, n2 = self.grid.shape
        U = u.reshape(n1, n2)
        h = self.grid.h
        gx = (U[2:, 1:-1] - U[:-2, 1:-1]) / (2 * h)
        gy = (U[1:-1, 2:] - U[1:-1, :-2]) / (2 * h)
        return np.stack([gx.ravel(), gy.ravel()], axis=1)

    def f1_values(self, u):
        if callable(self.f1):
            g = self.centered_gradient(u)
            return np.ascontiguousarray(np.asarray(self.f1(g), dtype=float))
        return np.full(len(self.grid.interior), float(self.f1))

    def residual(self, u, backend=None, full=False):
        """Residual on every node; with ``full`` also the branch data used by the Jacobian."""
        k = kernels if backend is None else kernels.backend_module(backend)
        u = np.ascontiguousarray(u, dtype=float)
        st = self.st
        g = self.grid
        r_int, branch, dd = k.interior_residual(u, g.interior, st.plus_idx, st.plus_w, st.plus_len,
                                                st.minus_idx, st.minus_w, st.minus_len, st.pairs,
                                                self.f0_int, self.f1_values(u), self.delta)
        r_bnd, active = k.boundary_residual(u, g.boundary, self.nbrs, self.normals, self.sigma,
                                            g.h, self.delta)
        res = np.empty(g.size)
        res[g.interior] = r_int
        res[g.boundary] = r_bnd
        if full:
            return res, (np.asarray(branch), np.asarray(dd), np.asarray(active))
        return res

    # -- Jacobian ----------------------------------------------------------
    def _diff_rows(self, d, m):
        """COO pieces of the linearized second difference along direction d at interior rows m."""
        st = self.st
        a = st.plus_len[d, m]
        b = st.minus_len[d, m]
        node = self.grid.interior[m]
        cp = 2.0 / (a * (a + b))
        cm = 2.0 / (b * (a + b))
        cols = [node, st.plus_idx[d, m, 0], st.plus_idx[d, m, 1], st.minus_idx[d, m, 0], st.minus_idx[d, m, 1]]
        vals = [-(cp + cm), cp * st.plus_w[d, m, 0], cp * st.plus_w[d, m, 1],
                cm * st.minus_w[d, m, 0], cm * st.minus_w[d, m, 1]]
        return cols, vals

    def jacobian(self, u, info):
        branch, dd, active = info
        g = self.grid
        st = self.st
        rows, cols, vals = [], [], []
        M = len(g.interior)
        m_all = np.arange(M)
        f1 = self.f1_values(u)
        ma = branch >= 0
        # determinant branch: -f1 (A_w dA_v + A_v dA_w), floored so rows never vanish
        if ma.any():
            m = m_all[ma]
            pr = st.pairs[branch[ma]]
            dv, dw = pr[:, 0], pr[:, 1]
            Av = np.maximum(dd[dv, m], self.cfg.jac_floor)
            Aw = np.maximum(dd[dw, m], self.cfg.jac_floor)
            for dirs, weight in ((dv, Aw), (dw, Av)):
                c, v = self._diff_rows(dirs, m)
                for cc, vv in zip(c, v):
                    rows.append(g.interior[m])
                    cols.append(cc)
                    vals.append(-f1[m] * weight * vv)
        lam = ~ma
        if lam.any():
            m = m_all[lam]
            d = -branch[lam] - 1
            c, v = self._diff_rows(d, m)
            for cc, vv in zip(c, v):
                rows.append(g.interior[m])
                cols.append(cc)
                vals.append(-vv)
        # boundary rows: derivative of the active upwind normal expression
        nrm = self.normals[active]
        for i in range(2):
            ni = nrm[:, i]
            side = np.where(ni > 0, 0, 1)
            nb = self.nbrs[np.arange(len(g.boundary)), i, side]
            use = (ni != 0) & (nb >= 0)
            w = np.abs(ni[use]) / g.h
            rows += [g.boundary[use], g.boundary[use]]
            cols += [g.boundary[use], nb[use]]
            vals += [w, -w]
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        vals = np.concatenate(vals)
        return sp.csr_matrix((vals, (rows, cols)), shape=(g.size, g.size))


# ---------------------------------------------------------------------------
# node-level operators (reference implementations, used by tests and docs)

def directional_second_difference(u, grid: Grid, node: int, v) -> float:
    """Second difference of ``u`` at ``node`` along integer direction ``v``, arms shortened at the boundary."""
    st = grid.stencils()
    d = _direction_index(st.dirs, v)
    m = _interior_position(grid, node)
    u = np.asarray(u, dtype=float)
    up = st.plus_w[d, m] @ u[st.plus_idx[d, m]]
    um = st.minus_w[d, m] @ u[st.minus_idx[d, m]]
    a, b = st.plus_len[d, m], st.minus_len[d, m]
    return float(2.0 / (a + b) * ((up - u[node]) / a + (um - u[node]) / b))


def lambda1_discrete(u, grid: Grid, node: int) -> float:
    """Smallest directional second difference over the stencil directions."""
    st = grid.stencils()
    return min(directional_second_difference(u, grid, node, v) for v in st.dirs)


def det_discrete(u, grid: Grid, node: int) -> float:
    """min over orthogonal pairs of max(D_v u, 0) * max(D_w u, 0)."""
    st = grid.stencils()
    vals = [directional_second_difference(u, grid, node, v) for v in st.dirs]
    return float(min(max(vals[i], 0.0) * max(vals[j], 0.0) for i, j in st.pairs))


def boundary_gradient(u, grid: Grid, node: int) -> np.ndarray:
    """Per-component gradient at a boundary node: inward one-sided differences across the
    boundary, centered differences along it."""
    n1, n2 = grid.shape
    i, j = (int(a) for a in grid.ij(node))
    U = np.asarray(u, dtype=float).reshape(n1, n2)
    h = grid.h
    out = np.empty(2)
    for comp, (k, n) in enumerate(((i, n1), (j, n2))):
        def val(kk):
            return U[kk, j] if comp == 0 else U[i, kk]
        if k == 0:
            out[comp] = (val(1) - val(0)) / h
        elif k == n - 1:
            out[comp] = (val(k) - val(k - 1)) / h
        else:
            out[comp] = (val(k + 1) - val(k - 1)) / (2 * h)
    return out


def _direction_index(dirs, v):
    v = tuple(int(a) for a in v)
    for k, d in enumerate(dirs.tolist()):
        if tuple(d) == v or tuple(-a for a in d) == v:
            return k
    raise ValueError(f"direction {v} is not in the stencil")


def _interior_position(grid: Grid, node: int) -> int:
    pos = np.searchsorted(grid.interior, node)
    if pos >= len(grid.interior) or grid.interior[pos] != node:
        raise ValueError("node is not interior")
    return int(pos)


def assemble_residual(u, f0, f1, target, grid: Grid, cfg: SchemeConfig | None = None):
    """Full residual vector of the scheme for the grid function ``u``."""
    return Problem(grid, f0, f1, target, cfg).residual(np.asarray(u, dtype=float).ravel())

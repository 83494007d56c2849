"""Uniform planar grids and wide-stencil geometry."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def stencil_directions(width: int = 5) -> np.ndarray:
    """Primitive integer directions (p, q) with max(|p|, |q|) <= (width-1)/2, one per line."""
    if width < 3 or width % 2 == 0:
        raise ValueError("stencil width must be an odd integer >= 3")
    r = (width - 1) // 2
    dirs = []
    for p in range(0, r + 1):
        for q in range(-r, r + 1):
            if (p, q) == (0, 0) or math.gcd(p, abs(q)) != 1:
                continue
            if p == 0 and q < 0:
                continue
            dirs.append((p, q))
    # order by angle in [-pi/2, pi/2) for reproducible listings
    dirs.sort(key=lambda v: math.atan2(v[1], v[0]))
    return np.asarray(dirs, dtype=np.intp)


def orthogonal_pairs(dirs: np.ndarray) -> np.ndarray:
    """Index pairs (i, j), i < j, with dirs[j] perpendicular to dirs[i]."""
    lookup = {tuple(v): k for k, v in enumerate(dirs.tolist())}
    pairs = []
    for i, (p, q) in enumerate(dirs.tolist()):
        perp = (-q, p) if (-q > 0 or (-q == 0 and p > 0)) else (q, -p)
        j = lookup.get(perp)
        if j is None:
            raise ValueError("direction set is not closed under rotation by 90 degrees")
        if i < j:
            pairs.append((i, j))
    return np.asarray(pairs, dtype=np.intp)


@dataclass
class Stencils:
    """Arm endpoints for every interior node and direction.

    Each arm end is a convex combination of two nodes (linear interpolation
    along the boundary when the arm is shortened), with its length.
    Interpolated arms are not exact on quadratics, so at nodes where either
    member of an orthogonal pair needs one, the pair is replaced by the axis
    pair; ``fallback`` marks those (direction, node) slots.
    """

    dirs: np.ndarray
    pairs: np.ndarray
    plus_idx: np.ndarray   # (D, M, 2)
    plus_w: np.ndarray     # (D, M, 2)
    plus_len: np.ndarray   # (D, M)
    minus_idx: np.ndarray
    minus_w: np.ndarray
    minus_len: np.ndarray
    fallback: np.ndarray | None = None


@dataclass
class Grid:
    """Uniform grid on the rectangle [lower, upper] with spacing h."""

    lower: tuple
    upper: tuple
    h: float
    width: int = 5
    shape: tuple = field(init=False)
    axes: tuple = field(init=False)

    def __post_init__(self):
        self.lower = tuple(float(a) for a in self.lower)
        self.upper = tuple(float(b) for b in self.upper)
        counts = []
        for a, b in zip(self.lower, self.upper):
            k = (b - a) / self.h
            if b <= a or abs(k - round(k)) > 1e-9 * max(1.0, k):
                raise ValueError("rectangle sides must be positive multiples of h")
            counts.append(int(round(k)) + 1)
        self.shape = tuple(counts)
        self.axes = tuple(np.linspace(a, b, c) for a, b, c in zip(self.lower, self.upper, counts))
        n1, n2 = self.shape
        I, J = np.meshgrid(np.arange(n1), np.arange(n2), indexing="ij")
        bnd = (I == 0) | (I == n1 - 1) | (J == 0) | (J == n2 - 1)
        self.boundary_mask = bnd
        self.interior = np.flatnonzero(~bnd.ravel())
        self.boundary = np.flatnonzero(bnd.ravel())
        self._stencils = None

    @property
    def size(self) -> int:
        return self.shape[0] * self.shape[1]

    def points(self) -> np.ndarray:
        X, Y = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([X.ravel(), Y.ravel()], axis=1)

    def index(self, i, j):
        return np.asarray(i) * self.shape[1] + np.asarray(j)

    def ij(self, k):
        return np.divmod(np.asarray(k), self.shape[1])

    def spacing(self) -> float:
        """Largest distance from a node to its nearest neighbour (= h on a uniform grid)."""
        return float(self.h)

    def stencils(self) -> Stencils:
        if self._stencils is None:
            self._stencils = build_stencils(self)
        return self._stencils

    def neighbours(self):
        """(B, 2, 2) array: for boundary node b, axis i and side s (0: minus, 1: plus), the neighbour or -1."""
        n1, n2 = self.shape
        bi, bj = self.ij(self.boundary)
        out = np.full((len(self.boundary), 2, 2), -1, dtype=np.intp)
        out[:, 0, 0] = np.where(bi > 0, self.index(bi - 1, bj), -1)
        out[:, 0, 1] = np.where(bi < n1 - 1, self.index(bi + 1, bj), -1)
        out[:, 1, 0] = np.where(bj > 0, self.index(bi, bj - 1), -1)
        out[:, 1, 1] = np.where(bj < n2 - 1, self.index(bi, bj + 1), -1)
        return out


def _arm(i, j, p, q, n1, n2):
    """Endpoint of the arm from (i, j) along (p, q), shortened to stay in the grid."""
    t = np.ones(len(i))
    if p > 0:
        t = np.minimum(t, (n1 - 1 - i) / p)
    elif p < 0:
        t = np.minimum(t, i / (-p))
    if q > 0:
        t = np.minimum(t, (n2 - 1 - j) / q)
    elif q < 0:
        t = np.minimum(t, j / (-q))
    ei = i + t * p
    ej = j + t * q
    # one coordinate of a shortened endpoint sits on a grid line; interpolate along the other
    fi, fj = np.floor(ei + 1e-12), np.floor(ej + 1e-12)
    ri, rj = ei - fi, ej - fj
    ri = np.where(np.abs(ri) < 1e-10, 0.0, ri)
    rj = np.where(np.abs(rj) < 1e-10, 0.0, rj)
    along_i = ri > 0
    a_i = fi.astype(np.intp)
    a_j = fj.astype(np.intp)
    b_i = np.where(along_i, a_i + 1, a_i)
    b_j = np.where(along_i, a_j, a_j + (rj > 0))
    frac = np.where(along_i, ri, rj)
    idx = np.stack([a_i * n2 + a_j, np.minimum(b_i, n1 - 1) * n2 + np.minimum(b_j, n2 - 1)], axis=-1)
    w = np.stack([1.0 - frac, frac], axis=-1)
    return idx, w, t


def build_stencils(grid: Grid, width: int | None = None) -> Stencils:
    width = grid.width if width is None else width
    dirs = stencil_directions(width)
    pairs = orthogonal_pairs(dirs)
    n1, n2 = grid.shape
    i, j = grid.ij(grid.interior)
    i = i.astype(float)
    j = j.astype(float)
    D, M = len(dirs), len(grid.interior)
    pi = np.empty((D, M, 2), dtype=np.intp)
    pw = np.empty((D, M, 2))
    pl = np.empty((D, M))
    mi = np.empty((D, M, 2), dtype=np.intp)
    mw = np.empty((D, M, 2))
    ml = np.empty((D, M))
    for d, (p, q) in enumerate(dirs.tolist()):
        norm = math.hypot(p, q) * grid.h
        idx, w, t = _arm(i, j, p, q, n1, n2)
        pi[d], pw[d], pl[d] = idx, w, t * norm
        idx, w, t = _arm(i, j, -p, -q, n1, n2)
        mi[d], mw[d], ml[d] = idx, w, t * norm
    interp = (pw[..., 1] > 0) | (mw[..., 1] > 0)
    fallback = np.zeros((D, M), dtype=bool)
    ax = [_direction_slot(dirs, (1, 0)), _direction_slot(dirs, (0, 1))]
    for a, b in pairs:
        bad = interp[a] | interp[b]
        if not bad.any():
            continue
        for slot, src in zip((a, b), ax):
            for arr in (pi, pw, pl, mi, mw, ml):
                arr[slot, bad] = arr[src, bad]
            fallback[slot] = bad
    return Stencils(dirs, pairs, pi, pw, pl, mi, mw, ml, fallback)


def _direction_slot(dirs, v):
    return int(np.flatnonzero((dirs == np.asarray(v)).all(axis=1))[0])


def discrete_normals(count: int = 64) -> np.ndarray:
    """Unit vectors at equally spaced angles; ``count`` is rounded up to a multiple of 4 so axis normals are present."""
    count = int(4 * math.ceil(count / 4))
    ang = 2 * math.pi * np.arange(count) / count
    nrm = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    nrm[np.abs(nrm) < 1e-15] = 0.0
    return nrm

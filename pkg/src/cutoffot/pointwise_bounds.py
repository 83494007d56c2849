"""Hölder envelopes, uniform pointwise rates and discrete Legendre/c-transforms."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import EmptyGrid, HypothesisViolated, ValidityExceeded
from .measures import sphere_area
from .rate_bounds import RateBound

try:
    from .ma import kernels as _kernels
except ImportError:  # pragma: no cover
    _kernels = None


@dataclass(frozen=True)
class HolderData:
    """Hölder constant and exponent of a potential on an eps-ball or rectangular domain."""

    C_H: float
    alpha: float
    domain: str = "eps_ball"
    eps: float | None = None
    lower: tuple | None = None
    upper: tuple | None = None
    p: float | None = None

    def __post_init__(self):
        if not (0 < self.alpha <= 1):
            raise ValueError("alpha must lie in (0, 1]")
        if not self.C_H > 0:
            raise ValueError("C_H must be positive")
        if self.domain not in ("eps_ball", "rectangle"):
            raise ValueError(f"unknown domain kind {self.domain!r}")

    @classmethod
    def from_moments(cls, n: int, p: float, C_H: float, **kw) -> "HolderData":
        if p <= n:
            raise HypothesisViolated("moment-derived Hölder data needs p > n")
        return cls(C_H=C_H, alpha=1.0 - n / p, p=p, **kw)

    @property
    def min_side(self) -> float:
        if self.lower is None or self.upper is None:
            return math.inf
        return float(min(b - a for a, b in zip(self.lower, self.upper)))


def _pochhammer_ratio(alpha, n):
    return math.factorial(n - 1) / math.prod(alpha + i for i in range(1, n + 1))


def envelope_beta(C_H: float, alpha: float, n: int, corner_factor: float = 0.25) -> float:
    """Mass coefficient of the bump C_H (dx - |x - x*|)^alpha on a domain fraction ``corner_factor``."""
    return corner_factor * C_H * sphere_area(n) * _pochhammer_ratio(alpha, n)


def cone_beta(C_H: float, alpha: float, n: int, corner_factor: float = 0.25) -> float:
    """Mass coefficient of the reverse cone (M - C_H |x - x*|^alpha)_+ with M = C_H rho^alpha.

    Any admissible function with maximum M at x* lies above this cone, so this
    coefficient gives the sharp envelope bound.
    """
    return corner_factor * C_H * sphere_area(n) * alpha / (n * (n + alpha))


def _unpack(hd, n):
    if isinstance(hd, HolderData):
        return hd.C_H, hd.alpha, hd.eps
    C_H, alpha = hd[:2]
    return float(C_H), float(alpha), (hd[2] if len(hd) > 2 else None)


def envelope_max_bound(hd, n: int, h_mass: float, sharp: bool = False) -> float:
    """C_H dx^alpha with dx = (h / beta)^{1/(alpha+n)}.

    ``sharp=True`` uses the reverse-cone coefficient instead of the bump one.
    Raises ValidityExceeded when dx exceeds twice the inner-ball radius.
    """
    C_H, alpha, eps = _unpack(hd, n)
    if h_mass < 0:
        raise ValueError("h_mass must be nonnegative")
    if h_mass == 0:
        return 0.0
    beta = (cone_beta if sharp else envelope_beta)(C_H, alpha, n)
    dx = (h_mass / beta) ** (1.0 / (alpha + n))
    if eps is not None and dx > 2 * eps:
        raise ValidityExceeded(f"dx={dx:.4g} exceeds 2*eps={2 * eps:.4g}")
    return C_H * dx**alpha


def extremal_bump(hd, n: int, h_mass: float, center=None):
    """The bump C_H (dx - |x - x*|)_+^alpha attaining the envelope bound, and dx."""
    C_H, alpha, _ = _unpack(hd, n)
    beta = envelope_beta(C_H, alpha, n)
    dx = (h_mass / beta) ** (1.0 / (alpha + n))
    c = np.zeros(n) if center is None else np.asarray(center, dtype=float)

    def psi(x):
        r = np.linalg.norm(np.asarray(x, dtype=float) - c, axis=-1)
        return C_H * np.maximum(dx - r, 0.0) ** alpha

    return psi, dx


def exponent_pair(n: int, p: int):
    """Exact ((1-n/p)/(1+n/q), alpha/(alpha+n)) with 1/p + 1/q = 1 and alpha = 1 - n/p."""
    p = Fraction(p)
    n = Fraction(n)
    q = p / (p - 1)
    alpha = 1 - n / p
    return (1 - n / p) / (1 + n / q), alpha / (alpha + n)


def _check_rate_hypotheses(p, n):
    if p <= n or p < 4:
        raise HypothesisViolated(f"need p > n and p >= 4, got p={p}, n={n}")


def _threshold_radius(h_of_R, h_max, lo=1e-3, hi=1e6):
    """Smallest R with h_of_R(R) <= h_max, assuming h decreases in R."""
    if h_of_R(lo) <= h_max:
        return lo
    if h_of_R(hi) > h_max:
        return math.inf
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        if h_of_R(mid) <= h_max:
            hi = mid
        else:
            lo = mid
        if hi / lo < 1 + 1e-12:
            break
    return hi


def pointwise_rate_bound_ball(hd: HolderData, p: float, n: int, h_of_R: Callable) -> RateBound:
    """C h(R)^{(1-n/p)/(1+n/q)} with C = C_H / beta^{alpha/(alpha+n)}."""
    _check_rate_hypotheses(p, n)
    alpha = hd.alpha
    q = p / (p - 1.0)
    expo = (1.0 - n / p) / (1.0 + n / q)
    beta = envelope_beta(hd.C_H, alpha, n)
    C = hd.C_H / beta ** (alpha / (alpha + n))
    R0 = 0.0
    if hd.eps is not None:
        R0 = _threshold_radius(lambda R: float(h_of_R(R)), beta * (2 * hd.eps) ** (alpha + n))

    def f(R):
        return C * np.asarray(h_of_R(R), dtype=float) ** expo

    return RateBound("pointwise_ball", f, {"C": C, "beta": beta, "alpha": alpha, "exponent": expo}, R0)


def pointwise_rate_bound_rect(hd: HolderData, p: float, n: int, h_of_R: Callable, dx_bar: float | None = None) -> RateBound:
    """C_H min(dx_bar, (h/beta_rect)^{1/(alpha+n)})^alpha with the corner factor 2^{-n}."""
    _check_rate_hypotheses(p, n)
    alpha = hd.alpha
    beta_r = envelope_beta(hd.C_H, alpha, n, corner_factor=2.0**-n)
    if dx_bar is None:
        dx_bar = 0.999 * hd.min_side
    if not dx_bar < hd.min_side:
        raise ValueError("dx_bar must be smaller than every side of the rectangle")

    def f(R):
        dx = np.minimum(dx_bar, (np.asarray(h_of_R(R), dtype=float) / beta_r) ** (1.0 / (alpha + n)))
        return hd.C_H * dx**alpha

    expo = alpha / (alpha + n)
    return RateBound("pointwise_rect", f, {"beta_rect": beta_r, "alpha": alpha, "exponent": expo,
                                            "dx_bar": dx_bar}, 0.0)


# ---------------------------------------------------------------------------
# discrete conjugates

def legendre_1d(x, g, y):
    """max_i (x_i y_j - g_i) for sorted ``x`` and arbitrary ``y``; inf entries of g are skipped."""
    x = np.asarray(x, dtype=float)
    g = np.asarray(g, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = np.isfinite(g)
    if not ok.any():
        return np.full(y.shape, -np.inf)
    xs, gs = x[ok], g[ok]
    hx, hg = _lower_hull(xs, gs)
    if len(hx) == 1:
        return y * hx[0] - hg[0]
    slopes = np.diff(hg) / np.diff(hx)
    k = np.searchsorted(slopes, y, side="left")
    return y * hx[k] - hg[k]


def _lower_hull(x, g):
    if _kernels is not None:
        idx = _kernels.lower_hull(np.ascontiguousarray(x), np.ascontiguousarray(g))
        return x[idx], g[idx]
    idx = _lower_hull_py(x, g)
    return x[idx], g[idx]


def _lower_hull_py(x, g):
    hull = []
    for i in range(len(x)):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # drop b if it lies on or above the chord a -> i
            if (g[b] - g[a]) * (x[i] - x[a]) >= (g[i] - g[a]) * (x[b] - x[a]):
                hull.pop()
            else:
                break
        hull.append(i)
    return np.asarray(hull, dtype=np.intp)


def legendre_transform(values, x_axes, y_axes):
    """Discrete convex conjugate sup_x (x . y - phi(x)) over a tensor grid (1D or 2D).

    Entries set to +inf are excluded (domain mask). The 2D transform is taken
    one axis at a time, which is exact for a supremum over a product grid.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise EmptyGrid("empty grid")
    if values.ndim == 1:
        return legendre_1d(x_axes[0] if isinstance(x_axes, (list, tuple)) else x_axes, values,
                           y_axes[0] if isinstance(y_axes, (list, tuple)) else y_axes)
    if values.ndim != 2:
        raise ValueError("only 1D and 2D grids are supported")
    x1, x2 = (np.asarray(a, dtype=float) for a in x_axes)
    y1, y2 = (np.asarray(a, dtype=float) for a in y_axes)
    inner = np.empty((len(x1), len(y2)))
    for i in range(len(x1)):
        inner[i] = legendre_1d(x2, values[i], y2)
    out = np.empty((len(y1), len(y2)))
    for j in range(len(y2)):
        col = -inner[:, j]
        col = np.where(np.isfinite(col), col, np.inf)
        out[:, j] = legendre_1d(x1, col, y1)
    return out


def c_transform(phi, cost, x_axes=None, y_axes=None, x_points=None, y_points=None, chunk=2048):
    """phi^c(y) = inf_x {c(x, y) - phi(x)} over a grid.

    For the quadratic cost on tensor grids this uses phi^c(y) = |y|^2/2 - g*(y)
    with g = |x|^2/2 - phi. Other costs (or scattered points) use a direct scan.
    """
    phi = np.asarray(phi, dtype=float)
    if phi.size == 0:
        raise EmptyGrid("empty potential")
    if cost.name in ("quadratic", "power_2") and x_axes is not None and y_axes is not None:
        xs = np.meshgrid(*x_axes, indexing="ij")
        ys = np.meshgrid(*y_axes, indexing="ij")
        sq_x = 0.5 * sum(a * a for a in xs)
        sq_y = 0.5 * sum(a * a for a in ys)
        g = np.where(np.isfinite(phi), sq_x - phi, np.inf)
        return sq_y - legendre_transform(g, list(x_axes), list(y_axes))
    if x_points is None:
        x_points = np.stack(np.meshgrid(*x_axes, indexing="ij"), axis=-1).reshape(-1, len(x_axes))
    if y_points is None:
        shape = tuple(len(a) for a in y_axes)
        y_points = np.stack(np.meshgrid(*y_axes, indexing="ij"), axis=-1).reshape(-1, len(y_axes))
    else:
        shape = (len(y_points),)
    flat = phi.reshape(-1)
    keep = np.isfinite(flat)
    xp, fp = np.asarray(x_points)[keep], flat[keep]
    out = np.empty(len(y_points))
    for s in range(0, len(y_points), chunk):
        yy = np.asarray(y_points[s:s + chunk])
        c = cost.h(np.linalg.norm(yy[:, None, :] - xp[None, :, :], axis=-1))
        out[s:s + chunk] = np.min(c - fp[None, :], axis=1)
    return out.reshape(shape)


def lipschitz_check_inverse_potential(values, axes, R_tilde: float, slack: float = 1e-8) -> dict:
    """Largest finite-difference slope along grid edges, compared with R_tilde."""
    values = np.asarray(values, dtype=float)
    slopes = []
    for ax, coords in enumerate(axes):
        d = np.diff(values, axis=ax)
        step = np.diff(np.asarray(coords, dtype=float))
        shape = [1] * values.ndim
        shape[ax] = -1
        s = np.abs(d) / step.reshape(shape)
        s = s[np.isfinite(s)]
        if s.size:
            slopes.append(float(s.max()))
    max_slope = max(slopes) if slopes else 0.0
    return {"max_slope": max_slope, "R_tilde": float(R_tilde), "slack": slack,
            "passes": bool(max_slope <= R_tilde + slack)}


def duality_rate_transfer(k_of_R: Callable, R0: float = 0.0) -> RateBound:
    """The forward-potential bound k(R) carries over unchanged to the inverse potential."""
    if isinstance(k_of_R, RateBound):
        return RateBound("inverse_potential", k_of_R.func, dict(k_of_R.constants), k_of_R.R0)
    return RateBound("inverse_potential", lambda R: np.asarray(k_of_R(R), dtype=float), {}, R0)

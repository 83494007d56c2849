"""Adaptive Simpson quadrature and helpers for half-line integrals.

Integrands are vectorized callables. Adaptation runs breadth first so that
every refinement level costs a single call of the integrand.
"""
import math

import numpy as np

from .errors import DivergentIntegral

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _eval(f, x):
    v = np.asarray(f(x), dtype=float)
    if v.shape != np.shape(x):
        v = np.broadcast_to(v, np.shape(x)).copy()
    return np.where(np.isfinite(v), v, 0.0)


def simpson_panels(f, edges, tol=1e-10, rel_tol=1e-11, max_depth=40, max_intervals=400_000):
    """Adaptive Simpson integral of ``f`` over each panel given by ``edges``.

    A sub-interval is accepted once its Richardson error estimate falls below
    the stricter of its share of ``tol`` and ``rel_tol`` times its own size,
    so small tail panels keep relative accuracy.
    """
    edges = np.asarray(edges, dtype=float)
    npan = len(edges) - 1
    out = np.zeros(npan)
    if npan <= 0:
        return out
    a, b = edges[:-1].copy(), edges[1:].copy()
    ids = np.arange(npan)
    m = 0.5 * (a + b)
    # endpoints are sampled a hair inside each panel, giving one-sided limits
    # at jumps that are aligned with panel edges
    nudge = 1e-13 * (b - a)
    fa, fm, fb = _eval(f, a + nudge), _eval(f, m), _eval(f, b - nudge)
    whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0
    eps = np.full(npan, float(tol))
    for depth in range(max_depth + 1):
        if len(a) == 0:
            break
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        vals = _eval(f, np.concatenate([lm, rm]))
        flm, frm = vals[: len(a)], vals[len(a):]
        left = (m - a) * (fa + 4.0 * flm + fm) / 6.0
        right = (b - m) * (fm + 4.0 * frm + fb) / 6.0
        delta = left + right - whole
        # relative accuracy is demanded only down to a floor of 1e-6 * eps so
        # that noisy integrands crossing zero still terminate
        lim = 15.0 * np.maximum(np.minimum(eps, rel_tol * np.abs(left + right)), 1e-6 * eps)
        done = (np.abs(delta) <= lim) | (depth == max_depth) | (b - a <= 1e-15 * np.maximum(1.0, np.abs(a)))
        if len(a) > max_intervals:
            done[:] = True
        np.add.at(out, ids[done], (left + right + delta / 15.0)[done])
        keep = ~done
        if not keep.any():
            break
        a_k, m_k, b_k = a[keep], m[keep], b[keep]
        a = np.concatenate([a_k, m_k])
        b = np.concatenate([m_k, b_k])
        ids = np.concatenate([ids[keep], ids[keep]])
        fa = np.concatenate([fa[keep], fm[keep]])
        fb = np.concatenate([fm[keep], fb[keep]])
        fm = np.concatenate([flm[keep], frm[keep]])
        whole = np.concatenate([left[keep], right[keep]])
        eps = np.concatenate([eps[keep], eps[keep]]) * 0.5
        m = 0.5 * (a + b)
    return out


def adaptive_simpson(f, a, b, tol=1e-10, rel_tol=1e-11):
    """Integrate a vectorized function over [a, b] to absolute tolerance ``tol``."""
    a, b = float(a), float(b)
    if a == b:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, tol, rel_tol)
    edges = np.linspace(a, b, 9)
    return float(simpson_panels(f, edges, tol / 8.0, rel_tol).sum())


def integrate_tail(f, r0, tol=1e-10, rel_tol=1e-11):
    """Integrate ``f`` over [r0, inf) using the substitution r = r0 + s/(1-s)."""
    r0 = float(r0)

    def g(s):
        s = np.asarray(s, dtype=float)
        one = 1.0 - s
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            r = r0 + s / one
            val = _eval(f, np.where(one > 0, r, r0)) / (one * one)
        return np.where(one > 0, val, 0.0)

    return adaptive_simpson(g, 0.0, 1.0, tol, rel_tol)


def gauss_partial(f, lo, hi):
    """Vectorized 16-point Gauss-Legendre rule over many intervals [lo_i, hi_i]."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[..., None] + half[..., None] * _GL_NODES
    vals = _eval(f, x)
    return half * (vals @ _GL_WEIGHTS)


def gauss_panels(f, edges):
    """Composite 16-point Gauss-Legendre integrals over consecutive ``edges``."""
    edges = np.asarray(edges, dtype=float)
    return gauss_partial(f, edges[:-1], edges[1:])


def log_panel_sums(f, start, decades=3, per_decade=4, tol=1e-12):
    """Integrals of ``f`` over log-spaced panels covering ``decades`` beyond ``start``."""
    edges = float(start) * np.logspace(0, decades, decades * per_decade + 1)
    return simpson_panels(f, edges, tol)


def check_finite(value, what="integral"):
    if not math.isfinite(value):
        raise DivergentIntegral(f"{what} is not finite")
    return value

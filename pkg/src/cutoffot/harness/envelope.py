"""Random nonnegative Hölder functions of prescribed mass on a disk."""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy import optimize

FAMILIES = ("peaks", "thresholded", "bumps")


class HolderSample(NamedTuple):
    family: str
    maximum: float
    mass: float
    apex_radius: float


def polar_nodes(eps: float, n_r: int = 400, n_t: int = 256):
    """Midpoint polar quadrature nodes and weights on the disk of radius ``eps``."""
    r = (np.arange(n_r) + 0.5) * eps / n_r
    t = (np.arange(n_t) + 0.5) * 2 * math.pi / n_t
    R, T = np.meshgrid(r, t, indexing="ij")
    pts = np.stack([R * np.cos(T), R * np.sin(T)], axis=-1).reshape(-1, 2)
    w = (R * (eps / n_r) * (2 * math.pi / n_t)).ravel()
    return pts, w


def _uniform_in_disk(rng, k, eps):
    rad = eps * np.sqrt(rng.uniform(size=k))
    ang = rng.uniform(0, 2 * math.pi, size=k)
    return np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)


def sample_holder_function(rng, eps=0.5, C_H=1.0, alpha=0.5, h_mass=0.01, family=None,
                           nodes=None) -> HolderSample:
    """Draw one admissible function and scale it to mass ``h_mass``.

    peaks: max_k (s w_k - C_H |x - a_k|^alpha)_+
    thresholded: (s - min_k (v_k + C_H |x - b_k|^alpha))_+
    bumps: max_k C_H (s w_k - |x - a_k|)_+^alpha
    Each is Hölder with constant C_H and exponent alpha, and its mass is
    increasing in s, so s is found by root finding.
    """
    family = family or FAMILIES[rng.integers(len(FAMILIES))]
    pts, w = nodes if nodes is not None else polar_nodes(eps)
    k = int(rng.integers(1, 5))
    centres = _uniform_in_disk(rng, k, eps)
    dist = np.linalg.norm(pts[None, :, :] - centres[:, None, :], axis=-1)
    weights = rng.uniform(0.3, 1.0, size=k)
    weights[rng.integers(k)] = 1.0
    if family == "peaks":
        D = C_H * dist**alpha
        f = lambda s: np.max(np.maximum(s * weights[:, None] - D, 0.0), axis=0)
        top = lambda s: float(s)
    elif family == "thresholded":
        offsets = rng.uniform(0.0, 0.3, size=k)
        offsets[rng.integers(k)] = 0.0
        g = np.min(offsets[:, None] + C_H * dist**alpha, axis=0)
        f = lambda s: np.maximum(s - g, 0.0)
        top = lambda s: float(s - offsets.min())
    elif family == "bumps":
        f = lambda s: C_H * np.max(np.maximum(s * weights[:, None] - dist, 0.0), axis=0) ** alpha
        top = lambda s: float(C_H * s**alpha)
    else:
        raise ValueError(f"unknown family {family!r}")
    mass = lambda s: float(w @ f(s))
    hi = 1.0
    while mass(hi) < h_mass:
        hi *= 2.0
    s = optimize.brentq(lambda s: mass(s) - h_mass, 0.0, hi, xtol=1e-14, rtol=1e-13)
    # the analytic maximum is attained at a centre, which lies in the disk
    apex = centres[int(np.argmax(weights))]
    return HolderSample(family, top(s), mass(s), float(np.linalg.norm(apex)))


def sample_many(count: int, seed: int = 0, **kw) -> list:
    rng = np.random.default_rng(seed)
    nodes = polar_nodes(kw.get("eps", 0.5))
    return [sample_holder_function(rng, nodes=nodes, family=FAMILIES[i % len(FAMILIES)], **kw)
            for i in range(count)]

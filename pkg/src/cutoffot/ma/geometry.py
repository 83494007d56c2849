"""Convex target domains: signed distances and support functions."""
from __future__ import annotations

import numpy as np

from ..errors import DegenerateDomain


class Rectangle:
    def __init__(self, lower, upper):
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        if np.any(self.upper <= self.lower):
            raise DegenerateDomain("rectangle has empty interior")

    def signed_distance(self, y):
        y = np.asarray(y, dtype=float)
        below = self.lower - y
        above = y - self.upper
        out = np.maximum(np.maximum(below, above), 0.0)
        outside = np.linalg.norm(out, axis=-1)
        inside = np.max(np.maximum(below, above), axis=-1)
        return np.where(outside > 0, outside, np.minimum(inside, 0.0))

    def support(self, nrm):
        nrm = np.asarray(nrm, dtype=float)
        return np.sum(np.maximum(nrm * self.lower, nrm * self.upper), axis=-1)

    @property
    def bounds(self):
        return self.lower, self.upper


class Disk:
    def __init__(self, center=(0.0, 0.0), radius=1.0):
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        if not self.radius > 0:
            raise DegenerateDomain("disk radius must be positive")

    def signed_distance(self, y):
        return np.linalg.norm(np.asarray(y, dtype=float) - self.center, axis=-1) - self.radius

    def support(self, nrm):
        nrm = np.asarray(nrm, dtype=float)
        return nrm @ self.center + self.radius * np.linalg.norm(nrm, axis=-1)

    @property
    def bounds(self):
        return self.center - self.radius, self.center + self.radius


class ConvexPolygon:
    """Convex polygon from its vertices (any orientation, reordered counter-clockwise)."""

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise DegenerateDomain("a polygon needs at least three planar vertices")
        area2 = np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1])
        if abs(area2) < 1e-14:
            raise DegenerateDomain("polygon has zero area")
        if area2 < 0:
            v = v[::-1]
        e = np.roll(v, -1, axis=0) - v
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        if np.any(cross < -1e-12):
            raise DegenerateDomain("polygon is not convex")
        self.vertices = v
        self.edges = e
        nrm = np.stack([e[:, 1], -e[:, 0]], axis=1)
        self.normals = nrm / np.linalg.norm(nrm, axis=1)[:, None]
        self.offsets = np.einsum("ij,ij->i", self.normals, v)

    def signed_distance(self, y):
        y = np.asarray(y, dtype=float)
        flat = y.reshape(-1, 2)
        planes = flat @ self.normals.T - self.offsets
        inside = np.max(planes, axis=1)
        # exterior: distance to the nearest edge segment, which accounts for vertex regions
        rel = flat[:, None, :] - self.vertices[None, :, :]
        t = np.clip(np.einsum("pkj,kj->pk", rel, self.edges) / np.einsum("kj,kj->k", self.edges, self.edges), 0, 1)
        closest = self.vertices[None] + t[..., None] * self.edges[None]
        dist = np.min(np.linalg.norm(flat[:, None, :] - closest, axis=-1), axis=1)
        out = np.where(inside > 0, dist, inside)
        return out.reshape(y.shape[:-1])

    def support(self, nrm):
        nrm = np.asarray(nrm, dtype=float)
        return np.max(nrm @ self.vertices.T, axis=-1)

    @property
    def bounds(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)


def signed_distance_rect(domain, y):
    """Signed Euclidean distance to a rectangle/polygon/disk: negative inside, positive outside.

    ``domain`` may be a domain object or a (lower, upper) pair describing a rectangle.
    """
    if isinstance(domain, (tuple, list)) and len(domain) == 2 and np.ndim(domain[0]) == 1:
        domain = Rectangle(*domain)
    return domain.signed_distance(y)

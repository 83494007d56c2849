"""Radially symmetric transport costs c(x, y) = h(|x - y|)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import UnknownCost

R_MAX = 1e3


@dataclass(frozen=True)
class CostFunction:
    """Cost profile h with derivative and optional growth pair (M, k).

    The growth pair certifies |h'(r)| <= (M / 2^k) r^(2^k - 1); costs whose
    derivative is not polynomially bounded carry ``growth=None``.
    """

    name: str
    h: Callable
    h_prime: Callable
    growth: Optional[tuple] = None

    def __call__(self, x, y):
        d = np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float), axis=-1)
        return self.h(d)

    def check_invariants(self, r_max: float = R_MAX, npts: int = 1000) -> dict:
        """Sampled checks of h(0)=0, monotonicity, strict convexity and growth."""
        r = np.concatenate([[0.0], np.geomspace(1e-3, r_max, npts - 1)])
        hv = self.h(r)
        report = {
            "zero_at_origin": float(self.h(0.0)) == 0.0,
            "increasing": bool(np.all(np.diff(hv) > 0)),
        }
        # strict midpoint convexity on consecutive triples of the log grid
        a, b = r[:-2], r[2:]
        report["strictly_convex"] = bool(np.all(self.h(0.5 * (a + b)) < 0.5 * (self.h(a) + self.h(b))))
        if self.growth is None:
            report["growth"] = None
        else:
            M, k = self.growth
            q = 2**k
            rr = r[1:]
            lhs = np.abs(self.h_prime(rr))
            rhs = (M / q) * rr ** (q - 1)
            report["growth"] = bool(np.all(lhs <= rhs * (1 + 1e-12)))
        return report

    @property
    def valid(self) -> bool:
        rep = self.check_invariants()
        return all(v is not False for v in rep.values())


def _power(p: float) -> CostFunction:
    # h = t^p / p has h' = t^(p-1); the growth bound needs p - 1 = 2^k - 1
    k = int(round(math.log2(p)))
    growth = (float(2**k), k) if 2**k == p else None
    return CostFunction(
        name=f"power_{p:g}",
        h=lambda t, p=p: np.asarray(t, dtype=float) ** p / p,
        h_prime=lambda t, p=p: np.asarray(t, dtype=float) ** (p - 1),
        growth=growth,
    )


def _cosh() -> CostFunction:
    return CostFunction(
        name="cosh_minus_one",
        h=lambda t: np.cosh(np.asarray(t, dtype=float)) - 1.0,
        h_prime=lambda t: np.sinh(np.asarray(t, dtype=float)),
        growth=None,
    )


def builtin_cost(name: str) -> CostFunction:
    """Return one of the built-in costs, after checking its invariants."""
    key = name.strip().lower()
    if key == "quadratic":
        cost = CostFunction(
            name="quadratic",
            h=lambda t: 0.5 * np.asarray(t, dtype=float) ** 2,
            h_prime=lambda t: np.asarray(t, dtype=float),
            growth=(2.0, 1),
        )
    elif key.startswith("power_"):
        try:
            p = float(key[len("power_"):])
        except ValueError as exc:
            raise UnknownCost(name) from exc
        if p not in (2.0, 4.0):
            raise UnknownCost(name)
        cost = _power(p)
    elif key == "cosh_minus_one":
        cost = _cosh()
    else:
        raise UnknownCost(name)
    # cosh overflows near r_max; its invariants are checked on a shorter range
    rep = cost.check_invariants(r_max=R_MAX if cost.growth is not None else 50.0)
    if not all(v is not False for v in rep.values()):
        raise ValueError(f"built-in cost {name} failed its checks: {rep}")
    return cost

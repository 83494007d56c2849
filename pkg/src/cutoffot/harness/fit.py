"""Least-squares rate fits."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ..errors import DegenerateFit


class RateFit(NamedTuple):
    abscissa: str  # "log R", "R" or "h"
    slope: float
    intercept: float
    r_squared: float
    window: tuple


def fit_rate(points, model: str = "power", abscissa: str | None = None) -> RateFit:
    """Slope of log y against log x (power) or x (exponential)."""
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 4:
        raise DegenerateFit("a rate fit needs at least 4 (x, y) points")
    x, y = pts[:, 0], pts[:, 1]
    if np.any(y <= 0) or not np.all(np.isfinite(pts)):
        raise DegenerateFit("ordinates must be positive and finite")
    if model == "power":
        if np.any(x <= 0):
            raise DegenerateFit("power fits need positive abscissae")
        X = np.log(x)
        kind = abscissa or "log R"
    elif model == "exponential":
        X = x
        kind = abscissa or "R"
    else:
        raise ValueError(f"unknown model {model!r}")
    Y = np.log(y)
    if np.ptp(X) <= 1e-12 * max(1.0, np.max(np.abs(X))):
        raise DegenerateFit("abscissae are all equal")
    slope, intercept = np.polyfit(X, Y, 1)
    resid = Y - (slope * X + intercept)
    ss_tot = float(np.sum((Y - Y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return RateFit(kind, float(slope), float(intercept), r2, (float(x.min()), float(x.max())))

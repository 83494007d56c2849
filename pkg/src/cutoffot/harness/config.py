"""Flat key = value study configuration."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields

from ..errors import ConfigError, UnknownCase, UnknownCost, UnknownDensity

KINDS = ("radial-map", "radial-potential", "tails", "w1", "envelope", "pointwise-rate",
         "ma-solve", "ma-validate", "ma-radial")


def parse_grid(text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    text = str(text).strip()
    if not text:
        return ()
    out = []
    for part in text.split(","):
        part = part.strip()
        if "/" in part:
            a, b = part.split("/")
            out.append(float(a) / float(b))
        else:
            out.append(float(part))
    return tuple(out)


@dataclass
class StudyConfig:
    kind: str = "radial-map"
    source: str = "uniform_ball"
    target: str = "gaussian"
    densities: tuple = ("gaussian", "pareto_tail(4)")
    cost: str = "quadratic"
    dim: int = 2
    R_grid: tuple = (1.0, 1.5, 2.0, 3.0, 4.0)
    h_grid: tuple = (1 / 16, 1 / 32, 1 / 64)
    eval_grid: tuple = (0.25, 0.5, 1.0, 2.0)
    seed: int = 0
    samples: int = 200
    p: int = 4
    case: str = "identity"
    eps: float = 0.5
    h_mass: float = 0.01
    C_H: float = 1.0
    alpha: float = 0.5
    workers: int = 4
    out: str = "results"
    plots: bool = True
    extra: dict = field(default_factory=dict)

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("extra")
        return d


_CONVERT = {
    "kind": str, "source": str, "target": str, "cost": str, "case": str, "out": str,
    "dim": int, "seed": int, "samples": int, "p": int, "workers": int,
    "eps": float, "h_mass": float, "C_H": float, "alpha": float,
    "R_grid": parse_grid, "h_grid": parse_grid, "eval_grid": parse_grid,
    "densities": lambda s: tuple(x.strip() for x in _split_names(s)),
    "plots": lambda s: s if isinstance(s, bool) else str(s).strip().lower() in ("on", "true", "1", "yes"),
}
_ALIASES = {"r_grid": "R_grid", "r-grid": "R_grid", "h-grid": "h_grid", "eval-grid": "eval_grid", "c_h": "C_H"}


def _split_names(s):
    if isinstance(s, (list, tuple)):
        return list(s)
    # split on commas that are not inside parentheses
    out, depth, cur = [], 0, ""
    for ch in str(s):
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur += ch
    if cur.strip():
        out.append(cur)
    return out


def read_config_file(path: str) -> dict:
    raw = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}", "expected key = value")
            k, v = line.split("=", 1)
            raw[k.strip()] = v.strip()
    return raw


def build_config(raw: dict, base: StudyConfig | None = None) -> StudyConfig:
    """Typed config from string values; unknown keys or bad values raise ConfigError."""
    cfg = base or StudyConfig()
    names = {f.name for f in fields(StudyConfig)}
    for key, val in raw.items():
        k = _ALIASES.get(key, key)
        if k not in names or k == "extra":
            raise ConfigError(key, "unknown key")
        try:
            setattr(cfg, k, _CONVERT[k](val))
        except (TypeError, ValueError) as exc:
            raise ConfigError(key, str(exc)) from None
    validate(cfg)
    return cfg


def _strictly_increasing(key, grid, required=True):
    if required and not grid:
        raise ConfigError(key, "grid is empty")
    if any(b <= a for a, b in zip(grid[:-1], grid[1:])):
        raise ConfigError(key, "grid must be strictly increasing")
    if any(not math.isfinite(v) for v in grid):
        raise ConfigError(key, "grid values must be finite")


def validate(cfg: StudyConfig) -> StudyConfig:
    from ..costs import builtin_cost
    from ..measures import density_from_name
    from ..oracles import make_manufactured

    if cfg.kind not in KINDS:
        raise ConfigError("kind", f"unknown study kind {cfg.kind!r}")
    if cfg.kind.startswith("ma-"):
        # spacings are listed coarse to fine; strictly monotone either way is accepted
        h = cfg.h_grid
        _strictly_increasing("h_grid", tuple(sorted(h)))
        if list(h) not in (sorted(h), sorted(h, reverse=True)):
            raise ConfigError("h_grid", "grid must be strictly monotone")
        if any(h <= 0 for h in cfg.h_grid):
            raise ConfigError("h_grid", "spacings must be positive")
    elif cfg.kind not in ("envelope",):
        _strictly_increasing("R_grid", cfg.R_grid)
    if cfg.kind in ("radial-map", "radial-potential"):
        _strictly_increasing("eval_grid", cfg.eval_grid)
    try:
        for name in (cfg.source, cfg.target, *cfg.densities):
            density_from_name(name, cfg.dim)
    except (UnknownDensity, ValueError) as exc:
        raise ConfigError("densities", str(exc)) from None
    try:
        builtin_cost(cfg.cost)
    except UnknownCost as exc:
        raise ConfigError("cost", str(exc)) from None
    if cfg.kind in ("ma-solve", "ma-validate"):
        try:
            make_manufactured(cfg.case)
        except UnknownCase as exc:
            raise ConfigError("case", str(exc)) from None
    if cfg.workers < 1:
        raise ConfigError("workers", "need at least one worker")
    return cfg

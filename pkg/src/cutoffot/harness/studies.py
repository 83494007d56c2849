"""Study runners: each returns sorted rows pairing measured values with bounds."""
from __future__ import annotations

import csv
import json
import math
import os
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import __version__
from ..costs import builtin_cost
from ..errors import DegenerateFit, InfiniteMoment, MissingColumn, NumericFailure
from ..measures import (
    cumulative_profile,
    density_from_name,
    exponential_logconcave,
    gaussian_logconcave,
    largest_finite_moment,
    moment,
)
from ..pointwise_bounds import HolderData, cone_beta, envelope_max_bound, pointwise_rate_bound_ball
from ..radial_ot import w1_exact_radial
from ..rate_bounds import (
    map_error_bound_inverse,
    map_gap,
    potential_error_bound_inverse,
    potential_gap,
    tail_bound_logconcave,
    tail_bound_moment,
    w1_cutoff_bound,
    w1_logconcave_bound,
    w1_moment_bound,
)
from .config import StudyConfig
from .envelope import sample_many
from .fit import fit_rate
from .plot import emit_plot


@dataclass
class Table:
    name: str
    columns: list
    rows: list = field(default_factory=list)
    sort_key: tuple = ()
    plot: dict | None = None

    def sorted_rows(self):
        key = self.sort_key or tuple(self.columns[:2])
        return sorted(self.rows, key=lambda r: tuple(_sortable(r.get(k)) for k in key))


@dataclass
class StudyReport:
    tables: list
    violations: int = 0
    files: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)


def _sortable(v):
    if isinstance(v, (int, float, np.floating)):
        return (0, float(v), "")
    return (1, 0.0, str(v))


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return repr(v) if math.isfinite(v) else ("nan" if math.isnan(v) else ("inf" if v > 0 else "-inf"))
    return str(v)


def write_csv(path, table: Table):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(table.columns)
        for r in table.sorted_rows():
            w.writerow([_fmt(r.get(c, "")) for c in table.columns])
    return path


def _pool_map(cfg, fn, items):
    with ThreadPoolExecutor(max_workers=cfg.workers) as ex:
        return list(ex.map(fn, items))


def _logconcave_for(d):
    if d.name == "gaussian":
        return gaussian_logconcave(d.dim, d.scale)
    if d.name == "exponential_radial":
        return exponential_logconcave(d.dim, d.scale)
    return None


# ---------------------------------------------------------------------------

def radial_map_study(cfg: StudyConfig) -> StudyReport:
    mu = density_from_name(cfg.source, cfg.dim)
    nu = density_from_name(cfg.target, cfg.dim)
    F_mu, F_nu = cumulative_profile(mu), cumulative_profile(nu)
    bounds = {x: map_error_bound_inverse(mu, nu, x, F_mu, F_nu) for x in cfg.eval_grid}
    t = Table("radial_map", ["R", "x_norm", "measured", "bound", "C", "R0", "valid", "violation"])

    def point(R):
        out = []
        for x in cfg.eval_grid:
            b = bounds[x]
            gap = float(map_gap(mu, nu, x, R, F_mu, F_nu))
            val = float(b.value(R))
            valid = bool(b.is_valid(R))
            out.append({"R": R, "x_norm": x, "measured": gap, "bound": val, "C": b.constants["C"],
                        "R0": b.R0, "valid": valid, "violation": valid and gap > val})
        return out

    for rows in _pool_map(cfg, point, cfg.R_grid):
        t.rows += rows
    t.plot = {"x": "R", "series": ["measured", "bound"], "logy": True, "title": "map cutoff error"}
    return StudyReport([t], sum(r["violation"] for r in t.rows))


def radial_potential_study(cfg: StudyConfig) -> StudyReport:
    mu = density_from_name(cfg.source, cfg.dim)
    nu = density_from_name(cfg.target, cfg.dim)
    cost = builtin_cost(cfg.cost)
    F_mu, F_nu = cumulative_profile(mu), cumulative_profile(nu)
    bounds = {x: potential_error_bound_inverse(cost, mu, nu, x, cfg.eps, F_mu, F_nu) for x in cfg.eval_grid}
    t = Table("radial_potential", ["R", "x_norm", "measured", "bound", "R0", "valid", "violation"])
    for R in cfg.R_grid:
        for x in cfg.eval_grid:
            b = bounds[x]
            gap = float(potential_gap(cost, mu, nu, x, R, F_mu, F_nu))
            val = float(b.value(R))
            valid = bool(b.is_valid(R))
            t.rows.append({"R": R, "x_norm": x, "measured": gap, "bound": val, "R0": b.R0,
                           "valid": valid, "violation": valid and gap > val})
    t.plot = {"x": "R", "series": ["measured", "bound"], "logy": True, "title": "potential cutoff error"}
    return StudyReport([t], sum(r["violation"] for r in t.rows))


def tail_study(cfg: StudyConfig) -> StudyReport:
    t = Table("tails", ["density", "R", "tail", "moment_bound", "logconcave_bound", "valid", "violation"],
              sort_key=("density", "R"))
    fits = Table("tails_fit", ["density", "model", "slope", "intercept", "r_squared", "x_min", "x_max"],
                 sort_key=("density", "model"))

    def one(name):
        d = density_from_name(name, cfg.dim)
        F = cumulative_profile(d)
        lc = _logconcave_for(d)
        M_p = moment(d, cfg.p)
        rows = []
        for R in cfg.R_grid:
            tail = float(F.tail(R))
            mb = float(tail_bound_moment(d, cfg.p, R, M_p)) if math.isfinite(M_p) else math.nan
            lb = float(tail_bound_logconcave(lc, R)) if lc is not None and R >= 1 else math.nan
            valid = math.isfinite(mb) or math.isfinite(lb)
            viol = (math.isfinite(mb) and tail > mb) or (math.isfinite(lb) and tail > lb)
            rows.append({"density": name, "R": R, "tail": tail, "moment_bound": mb,
                         "logconcave_bound": lb, "valid": valid, "violation": bool(viol)})
        fit_rows = []
        pts = [(r["R"], r["tail"]) for r in rows if r["tail"] > 0]
        for model in ("power", "exponential"):
            try:
                f = fit_rate(pts, model)
            except DegenerateFit:
                continue
            fit_rows.append({"density": name, "model": model, "slope": f.slope, "intercept": f.intercept,
                             "r_squared": f.r_squared, "x_min": f.window[0], "x_max": f.window[1]})
        return rows, fit_rows

    for rows, frs in _pool_map(cfg, one, cfg.densities):
        t.rows += rows
        fits.rows += frs
    t.plot = [{"x": "R", "series": ["tail", "moment_bound", "logconcave_bound"], "logx": True, "logy": True,
               "title": f"tail mass {name}", "where": {"density": name}, "suffix": f"_{i}"}
              for i, name in enumerate(cfg.densities)]
    return StudyReport([t, fits], sum(r["violation"] for r in t.rows))


def w1_study(cfg: StudyConfig) -> StudyReport:
    t = Table("w1", ["density", "R", "exact", "cutoff_bound_ball", "cutoff_bound_cube", "moment_p",
                     "moment_bound", "logconcave_bound", "valid", "violation"], sort_key=("density", "R"))

    def one(name):
        d = density_from_name(name, cfg.dim)
        F = cumulative_profile(d)
        lc = _logconcave_for(d)
        p = min(largest_finite_moment(d, 8), cfg.p)
        M_p = moment(d, p) if p >= 2 else math.inf
        rows = []
        for R in cfg.R_grid:
            exact = w1_exact_radial(F, F.truncate(R))
            ball = w1_cutoff_bound(d, "ball", R, F)
            cube = w1_cutoff_bound(d, "cube", R) if d.dim <= 2 else math.nan
            mb = w1_moment_bound(d, p, R, M_p) if math.isfinite(M_p) and p >= 2 else math.nan
            lb = w1_logconcave_bound(lc, R) if lc is not None and R >= 1 else math.nan
            viol = exact > ball * (1 + 1e-9)
            if math.isfinite(mb):
                viol |= ball > mb
            if math.isfinite(lb):
                viol |= ball > lb
            rows.append({"density": name, "R": R, "exact": exact, "cutoff_bound_ball": ball,
                         "cutoff_bound_cube": cube, "moment_p": p, "moment_bound": mb,
                         "logconcave_bound": lb, "valid": True, "violation": bool(viol)})
        return rows

    for rows in _pool_map(cfg, one, cfg.densities):
        t.rows += rows
    t.plot = [{"x": "R", "series": ["exact", "cutoff_bound_ball", "moment_bound", "logconcave_bound"],
               "logy": True, "title": f"W1 to the cutoff, {name}", "where": {"density": name}, "suffix": f"_{i}"}
              for i, name in enumerate(cfg.densities)]
    return StudyReport([t], sum(r["violation"] for r in t.rows))


def envelope_study(cfg: StudyConfig) -> StudyReport:
    hd = HolderData(cfg.C_H, cfg.alpha, eps=cfg.eps)
    bound = envelope_max_bound(hd, cfg.dim, cfg.h_mass)
    sharp = envelope_max_bound(hd, cfg.dim, cfg.h_mass, sharp=True)
    samples = sample_many(cfg.samples, cfg.seed, eps=cfg.eps, C_H=cfg.C_H, alpha=cfg.alpha, h_mass=cfg.h_mass)
    t = Table("envelope", ["index", "family", "maximum", "mass", "apex_radius", "bound", "sharp_bound",
                           "valid", "violation", "sharp_violation"], sort_key=("index",))
    for i, s in enumerate(samples):
        t.rows.append({"index": i, "family": s.family, "maximum": s.maximum, "mass": s.mass,
                       "apex_radius": s.apex_radius, "bound": bound, "sharp_bound": sharp, "valid": True,
                       "violation": s.maximum > bound, "sharp_violation": s.maximum > sharp})
    t.plot = {"x": "apex_radius", "series": ["maximum", "bound", "sharp_bound"], "title": "envelope maxima"}
    return StudyReport([t], sum(r["violation"] for r in t.rows),
                       notes={"bound": bound, "sharp_bound": sharp, "beta_cone": cone_beta(cfg.C_H, cfg.alpha, cfg.dim)})


def pointwise_rate_study(cfg: StudyConfig) -> StudyReport:
    """Uniform potential bound from the W1 moment rate next to the measured radial potential gap."""
    mu = density_from_name(cfg.source, cfg.dim)
    nu = density_from_name(cfg.target, cfg.dim)
    cost = builtin_cost(cfg.cost)
    F_mu, F_nu = cumulative_profile(mu), cumulative_profile(nu)
    n, p = cfg.dim, cfg.p
    M_p = moment(nu, p)
    if not math.isfinite(M_p):
        raise InfiniteMoment(f"moment of order {p} is infinite for {cfg.target}")
    hd = HolderData.from_moments(n, p, cfg.C_H, eps=cfg.eps)
    rb = pointwise_rate_bound_ball(hd, p, n, lambda R: w1_moment_bound(nu, p, R, M_p))
    t = Table("pointwise_rate", ["R", "w1_bound", "bound", "measured_sup", "exponent", "R0", "valid", "violation"])
    for R in cfg.R_grid:
        gaps = potential_gap(cost, mu, nu, np.asarray(cfg.eval_grid), R, F_mu, F_nu)
        meas = float(np.max(gaps))
        val = float(rb.value(R))
        valid = bool(rb.is_valid(R))
        t.rows.append({"R": R, "w1_bound": float(w1_moment_bound(nu, p, R, M_p)), "bound": val,
                       "measured_sup": meas, "exponent": rb.constants["exponent"], "R0": rb.R0,
                       "valid": valid, "violation": valid and meas > val})
    t.plot = {"x": "R", "series": ["measured_sup", "bound"], "logx": True, "logy": True,
              "title": "uniform potential rate"}
    return StudyReport([t], sum(r["violation"] for r in t.rows))


# ---------------------------------------------------------------------------
# Monge-Ampere studies

def manufactured_errors(case_name: str, h: float, cfg_kw=None):
    from ..ma import Grid, Rectangle, SchemeConfig, solve_scheme
    from ..oracles import make_manufactured

    case = make_manufactured(case_name)
    grid = Grid(case.X[0], case.X[1], h)
    target = Rectangle(*case.Y)
    sol = solve_scheme(case.f0, case.f1, target, grid, SchemeConfig(**(cfg_kw or {})))
    pts = grid.points()
    exact = case.u(pts)
    diff = sol.u - exact
    diff -= diff.mean()
    g = sol.gradient().reshape(-1, 2)
    gerr = np.linalg.norm(g - case.grad(pts), axis=1)
    return {"case": case.name, "h": h, "max_error": float(np.max(np.abs(diff))),
            "grad_error": float(np.max(gerr)), "c": sol.c, "iterations": sol.iterations,
            "newton_steps": sol.newton_steps, "euler_steps": sol.euler_steps,
            "converged": sol.converged, "wall_time": sol.wall_time, "backend": sol.backend}, sol


def radial_ma_errors(h: float, R: float = 3.0, cfg_kw=None):
    """Gaussian cut to the cube [-R, R]^2 mapped onto the unit disk; h is relative to the cube side / 6."""
    from math import erf, sqrt

    from ..ma import Disk, Grid, SchemeConfig, solve_scheme
    from ..oracles import gaussian_to_disk

    step = 2 * R * h  # h = 1/N gives N intervals per side
    grid = Grid((-R, -R), (R, R), step)
    mass = erf(R / sqrt(2)) ** 2
    f0 = lambda x, y: np.exp(-0.5 * (x * x + y * y)) / (2 * math.pi * mass)
    sol = solve_scheme(f0, 1.0 / math.pi, Disk(), grid, SchemeConfig(**(cfg_kw or {})))
    pts = grid.points()
    r = np.linalg.norm(pts, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        T = np.where(r[:, None] > 0, pts / r[:, None] * gaussian_to_disk(r)[:, None], 0.0)
    g = sol.gradient().reshape(-1, 2)
    err = np.linalg.norm(g - T, axis=1)[grid.interior]
    return {"h": h, "spacing": step, "median_grad_error": float(np.median(err)),
            "mean_grad_error": float(np.mean(err)), "max_grad_error": float(np.max(err)),
            "iterations": sol.iterations, "converged": sol.converged, "wall_time": sol.wall_time,
            "backend": sol.backend}, sol


# wall times and the kernel backend go to the manifest so that CSVs stay byte-identical across runs
_MA_COLS = ["case", "h", "max_error", "grad_error", "c", "iterations", "newton_steps", "euler_steps",
            "converged"]


def _timings(rows):
    return {"wall_time": {repr(r["h"]): r["wall_time"] for r in rows},
            "backend": rows[0]["backend"] if rows else None}


def ma_solve_study(cfg: StudyConfig) -> StudyReport:
    h = cfg.h_grid[0]
    row, sol = manufactured_errors(cfg.case, h)
    summary = Table("ma_solve", _MA_COLS, [row], sort_key=("h",))
    pts = sol.grid.points()
    grad = sol.gradient().reshape(-1, 2)
    u = Table("u", ["x", "y", "u"], sort_key=("x", "y"))
    u.rows = [{"x": float(a), "y": float(b), "u": float(v)} for (a, b), v in zip(pts, sol.u)]
    g = Table("grad", ["x", "y", "ux", "uy"], sort_key=("x", "y"))
    g.rows = [{"x": float(a), "y": float(b), "ux": float(gx), "uy": float(gy)}
              for (a, b), (gx, gy) in zip(pts, grad)]
    log = Table("residual_log", ["iteration", "oscillation", "max_abs_u"], sort_key=("iteration",))
    log.rows = [{"iteration": k, "oscillation": m, "max_abs_u": a}
                for k, (m, a) in enumerate(zip(sol.history, sol.max_abs))]
    log.plot = {"x": "iteration", "series": ["oscillation"], "logy": True, "title": "residual oscillation"}
    return StudyReport([summary, u, g, log], 0, notes=_timings([row]))


def ma_validate_study(cfg: StudyConfig) -> StudyReport:
    t = Table("ma_validate", _MA_COLS, sort_key=("h",))
    for h in cfg.h_grid:
        t.rows.append(manufactured_errors(cfg.case, h)[0])
    errs = [r["max_error"] for r in sorted(t.rows, key=lambda r: -r["h"])]
    violations = sum(b >= a for a, b in zip(errs[:-1], errs[1:]))
    t.plot = {"x": "h", "series": ["max_error", "grad_error"], "logx": True, "logy": True,
              "title": f"manufactured case {cfg.case}"}
    return StudyReport([t], violations, notes=_timings(t.rows))


def ma_radial_study(cfg: StudyConfig) -> StudyReport:
    cols = ["h", "spacing", "median_grad_error", "mean_grad_error", "max_grad_error", "iterations",
            "converged"]
    t = Table("ma_radial", cols, sort_key=("h",))
    for h in cfg.h_grid:
        t.rows.append(radial_ma_errors(h)[0])
    errs = [r["median_grad_error"] for r in sorted(t.rows, key=lambda r: -r["h"])]
    violations = sum(b >= a for a, b in zip(errs[:-1], errs[1:]))
    t.plot = {"x": "h", "series": ["median_grad_error", "max_grad_error"], "logx": True, "logy": True,
              "title": "radial ground truth"}
    return StudyReport([t], violations, notes=_timings(t.rows))


RUNNERS = {
    "radial-map": radial_map_study,
    "radial-potential": radial_potential_study,
    "tails": tail_study,
    "w1": w1_study,
    "envelope": envelope_study,
    "pointwise-rate": pointwise_rate_study,
    "ma-solve": ma_solve_study,
    "ma-validate": ma_validate_study,
    "ma-radial": ma_radial_study,
}


def _versions():
    import scipy

    from ..ma import BACKEND

    return {"cutoffot": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__, "kernel_backend": BACKEND}


def run_study(cfg: StudyConfig) -> StudyReport:
    """Run a study and write its CSV tables, optional SVG plots and a manifest to ``cfg.out``."""
    os.makedirs(cfg.out, exist_ok=True)
    t0 = time.perf_counter()
    manifest = {"config": cfg.echo(), "versions": _versions(), "files": [], "status": "running"}
    mpath = os.path.join(cfg.out, "manifest.json")
    try:
        report = RUNNERS[cfg.kind](cfg)
    except NumericFailure as exc:
        manifest.update(status="numeric_failure", error=f"{type(exc).__name__}: {exc}",
                        wall_time=time.perf_counter() - t0)
        _dump(mpath, manifest)
        raise
    for table in report.tables:
        path = write_csv(os.path.join(cfg.out, f"{table.name}.csv"), table)
        report.files.append(path)
        manifest["files"].append({"path": os.path.basename(path), "columns": table.columns,
                                  "rows": len(table.rows)})
        if not cfg.plots or table.plot is None:
            continue
        for layout in table.plot if isinstance(table.plot, list) else [table.plot]:
            svg = os.path.join(cfg.out, f"{table.name}{layout.get('suffix', '')}.svg")
            try:
                emit_plot(path, layout, svg)
            except MissingColumn:
                continue
            report.files.append(svg)
            manifest["files"].append({"path": os.path.basename(svg)})
    manifest.update(status="ok", violations=int(report.violations), notes=report.notes,
                    wall_time=time.perf_counter() - t0)
    _dump(mpath, manifest)
    report.files.append(mpath)
    return report


def _dump(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")

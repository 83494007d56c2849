import csv
import json
import math

import numpy as np
import pytest

from cutoffot.errors import ConfigError, DegenerateFit, MissingColumn
from cutoffot.harness import EmptyData, build_config, emit_plot, fit_rate, read_config_file, run_study
from cutoffot.harness.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, EXIT_VIOLATION, main
from cutoffot.harness.config import parse_grid
from cutoffot.harness.envelope import FAMILIES, polar_nodes, sample_holder_function


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# -- config -------------------------------------------------------------------

def test_parse_grid_fractions():
    assert parse_grid("1/16, 1/32,0.5") == (1 / 16, 1 / 32, 0.5)


def test_config_file_round_trip(tmp_path):
    p = tmp_path / "study.cfg"
    p.write_text("# comment\nkind = w1\nR_grid = 1, 2, 4\nseed = 3\ndensities = gaussian, pareto_tail(4)\n")
    cfg = build_config(read_config_file(p))
    assert cfg.kind == "w1" and cfg.R_grid == (1.0, 2.0, 4.0) and cfg.seed == 3
    assert cfg.densities == ("gaussian", "pareto_tail(4)")
    text = "".join(f"{k} = {_flat(v)}\n" for k, v in cfg.echo().items())
    (tmp_path / "echo.cfg").write_text(text)
    assert build_config(read_config_file(tmp_path / "echo.cfg")).echo() == cfg.echo()


def _flat(v):
    return ", ".join(repr(x) if isinstance(x, float) else str(x) for x in v) if isinstance(v, tuple) else str(v)


@pytest.mark.parametrize("raw", [
    {"kind": "nope"},
    {"kind": "w1", "R_grid": ""},
    {"kind": "w1", "R_grid": "2,1"},
    {"kind": "w1", "R_grid": "1,1"},
    {"kind": "ma-validate", "h_grid": "1/32,1/16,1/64"},
    {"kind": "w1", "densities": "no_such_law"},
    {"kind": "radial-map", "cost": "no_such_cost"},
    {"kind": "ma-solve", "case": "no_such_case"},
    {"kind": "w1", "workers": "0"},
    {"kind": "w1", "bogus_key": "1"},
    {"kind": "w1", "seed": "x"},
])
def test_config_errors(raw):
    with pytest.raises(ConfigError):
        build_config(raw)


# -- fits ---------------------------------------------------------------------

def test_fit_power_exact():
    x = np.array([1.0, 2.0, 4.0, 8.0, 16.0])
    f = fit_rate(list(zip(x, x**-2.0)))
    assert f.slope == pytest.approx(-2.0, abs=1e-12) and f.r_squared == pytest.approx(1.0)


def test_fit_exponential_exact():
    x = np.arange(1.0, 7.0)
    f = fit_rate(list(zip(x, 3 * np.exp(-x))), model="exponential")
    assert f.slope == pytest.approx(-1.0, abs=1e-12)
    assert math.exp(f.intercept) == pytest.approx(3.0)


def test_fit_gaussian_tail_is_super_exponential():
    x = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    y = np.exp(-x**2 / 2)
    lo = fit_rate(list(zip(x[:3], y[:3])) + [(x[3], y[3])], model="exponential")
    local = [np.log(y[i + 1] / y[i]) for i in range(4)]
    assert all(b < a for a, b in zip(local[:-1], local[1:]))
    assert lo.r_squared < 1.0


def test_fit_errors():
    with pytest.raises(DegenerateFit):
        fit_rate([(1, 1), (2, 0.5), (3, 0.3)])
    with pytest.raises(DegenerateFit):
        fit_rate([(1, 1), (2, 0.0), (3, 0.3), (4, 0.2)])
    with pytest.raises(DegenerateFit):
        fit_rate([(2, 1), (2, 0.5), (2, 0.3), (2, 0.2)])
    with pytest.raises(ValueError):
        fit_rate([(1, 1), (2, 0.5), (3, 0.3), (4, 0.2)], model="spline")


# -- plots --------------------------------------------------------------------

def _csv(path, header, data):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        w.writerows(data)
    return path


def test_plot_deterministic(tmp_path):
    src = _csv(tmp_path / "d.csv", ["R", "a", "b"], [[1, 1.0, 2.0], [2, 0.5, 1.0], [4, 0.25, 0.5]])
    layout = {"x": "R", "series": ["a", "b"], "logx": True, "logy": True, "title": "demo"}
    emit_plot(src, layout, tmp_path / "one.svg")
    emit_plot(src, layout, tmp_path / "two.svg")
    one = (tmp_path / "one.svg").read_bytes()
    assert one == (tmp_path / "two.svg").read_bytes()
    assert one.count(b"<polyline") == 2 and b"demo" in one


def test_plot_errors(tmp_path):
    src = _csv(tmp_path / "d.csv", ["R", "a"], [[1, 1.0]])
    with pytest.raises(MissingColumn):
        emit_plot(src, {"x": "R", "series": ["zz"]}, tmp_path / "x.svg")
    empty = _csv(tmp_path / "e.csv", ["R", "a"], [])
    with pytest.raises(EmptyData):
        emit_plot(empty, {"x": "R", "series": ["a"]}, tmp_path / "x.svg")
    assert issubclass(EmptyData, MissingColumn)


# -- envelope sampler ---------------------------------------------------------

@pytest.mark.parametrize("family", FAMILIES)
def test_sampler_hits_mass(family):
    rng = np.random.default_rng(2)
    nodes = polar_nodes(0.5)
    s = sample_holder_function(rng, family=family, nodes=nodes)
    assert s.mass == pytest.approx(0.01, rel=1e-9) and s.maximum > 0 and s.apex_radius <= 0.5


def test_sampler_rejects_unknown_family():
    with pytest.raises(ValueError):
        sample_holder_function(np.random.default_rng(0), family="waves")


# -- studies and CLI ----------------------------------------------------------

def test_radial_study_rows(tmp_path):
    assert main(["radial-study", "--out", str(tmp_path), "--plots", "on"]) == EXIT_OK
    data = rows(tmp_path / "radial_map.csv")
    assert len(data) == 5 * 4
    for r in data:
        if r["valid"] == "1":
            assert float(r["measured"]) <= float(r["bound"])
        else:
            assert float(r["R"]) < float(r["R0"])
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["status"] == "ok" and man["violations"] == 0
    assert (tmp_path / "radial_map.svg").exists()


def test_radial_potential_study(tmp_path):
    assert main(["radial-study", "--potential", "--out", str(tmp_path), "--plots", "off"]) == EXIT_OK


def test_tail_study_slopes(tmp_path):
    assert main(["tail-study", "--out", str(tmp_path), "--plots", "off"]) == EXIT_OK
    fits = {(r["density"], r["model"]): float(r["slope"]) for r in rows(tmp_path / "tails_fit.csv")}
    for p in (3, 4, 5):
        assert fits[(f"pareto_tail({p})", "power")] == pytest.approx(-p, rel=0.05)


def test_outputs_byte_identical(tmp_path):
    for d in ("a", "b"):
        assert main(["w1-study", "--out", str(tmp_path / d), "--plots", "on"]) == EXIT_OK
    names = sorted(p.name for p in (tmp_path / "a").iterdir() if p.suffix in (".csv", ".svg"))
    assert "w1.csv" in names and any(n.endswith(".svg") for n in names)
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert b"\r\n" in (tmp_path / "a" / "w1.csv").read_bytes()


def test_w1_study_chain(tmp_path):
    report = run_study(build_config({"kind": "w1", "out": str(tmp_path), "plots": "off",
                                     "R_grid": "1,1.5,2,3,4"}))
    assert report.violations == 0


def test_cli_exit_codes(tmp_path):
    assert main(["w1-study", "--r-grid", "", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["w1-study", "--set", "nonsense", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["w1-study", "--config", str(tmp_path / "missing.cfg")]) == EXIT_CONFIG
    assert main(["radial-study", "--set", "target=pareto_tail(-3)", "--out", str(tmp_path)]) == EXIT_CONFIG
    # a tail exponent below the dimension has no finite mass
    out = tmp_path / "nf"
    assert main(["radial-study", "--set", "target=pareto_tail(0.5)", "--out", str(out),
                 "--plots", "off"]) == EXIT_NUMERIC
    assert json.loads((out / "manifest.json").read_text())["status"] != "ok"


def test_cli_violation_exit(tmp_path):
    # some admissible samples exceed the bump-based envelope bound, so the check flags them
    assert main(["envelope-check", "--out", str(tmp_path), "--plots", "off"]) == EXIT_VIOLATION


def test_ma_solve_outputs(tmp_path):
    assert main(["ma-solve", "--h-grid", "1/16", "--out", str(tmp_path), "--plots", "off"]) == EXIT_OK
    u = rows(tmp_path / "u.csv")
    assert len(u) == 17 * 17 and set(u[0]) == {"x", "y", "u"}
    assert set(rows(tmp_path / "grad.csv")[0]) == {"x", "y", "ux", "uy"}
    assert rows(tmp_path / "residual_log.csv")

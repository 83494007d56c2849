"""Command-line entry point: ``cutoffot <subcommand> [flags]``."""
from __future__ import annotations

import argparse
import sys

from ..errors import ConfigError, NumericFailure
from .config import StudyConfig, build_config, read_config_file

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VIOLATION = 0, 2, 3, 4

SUBCOMMANDS = {
    "radial-study": "radial-map",
    "tail-study": "tails",
    "w1-study": "w1",
    "envelope-check": "envelope",
    "pointwise-rate": "pointwise-rate",
    "ma-solve": "ma-solve",
    "ma-validate": "ma-validate",
    "ma-radial": "ma-radial",
}

_DEFAULTS = {
    "tails": {"R_grid": "10,15,20,30,50,70,100", "densities": "pareto_tail(3),pareto_tail(4),pareto_tail(5)"},
    "w1": {"R_grid": "1,1.5,2,3,4,6,8"},
    "envelope": {"samples": "200"},
    "pointwise-rate": {"target": "pareto_tail(6)", "R_grid": "2,3,4,6,8,12", "p": "5", "C_H": "1"},
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cutoffot", description="Cutoff transport studies")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--r-grid", dest="R_grid", help="comma-separated cutoff radii")
        p.add_argument("--h-grid", dest="h_grid", help="comma-separated grid spacings, e.g. 1/16,1/32")
        p.add_argument("--seed", help="random seed")
        p.add_argument("--plots", choices=("on", "off"), help="write SVG plots")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="any other config key (repeatable)")
        if name == "radial-study":
            p.add_argument("--potential", action="store_true", help="compare potentials instead of maps")
    return ap


def config_from_args(args) -> StudyConfig:
    kind = SUBCOMMANDS[args.command]
    if getattr(args, "potential", False):
        kind = "radial-potential"
    raw = {"kind": kind, **_DEFAULTS.get(kind, {})}
    if args.config:
        try:
            raw.update(read_config_file(args.config))
        except OSError as exc:
            raise ConfigError("config", str(exc)) from None
        raw["kind"] = kind
    for item in args.set:
        if "=" not in item:
            raise ConfigError(item, "expected KEY=VALUE")
        k, v = item.split("=", 1)
        raw[k.strip()] = v.strip()
    for key in ("out", "R_grid", "h_grid", "seed", "plots"):
        val = getattr(args, key)
        if val is not None:
            raw[key] = val
    return build_config(raw)


def main(argv=None) -> int:
    from .studies import run_study

    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        report = run_study(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericFailure as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for f in report.files:
        print(f)
    if report.violations:
        print(f"{report.violations} measured value(s) exceeded their bound", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

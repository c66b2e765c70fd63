"""Command-line front end.

    nanofiber-cqed list-scenarios
    nanofiber-cqed run --scenario fig4 --out fig4.csv [--set key=value ...] [--plot]
    nanofiber-cqed run --config my.cfg --out custom.csv
    nanofiber-cqed run --scenario fig2a --check
    nanofiber-cqed selftest
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

from .config import fmt, parse_config
from .errors import ConfigError, SolverError
from .sweep import (
    ANALYTIC_COLUMNS,
    CSV_COLUMNS,
    SweepResult,
    builtin_scenarios,
    max_relative_gap,
    run_scenario,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_SOLVER = 4

CHECK_THRESHOLD = 0.01

log = logging.getLogger("nanofiber_cqed")


def _cell(x) -> str:
    if isinstance(x, float):
        return "nan" if math.isnan(x) else f"{x:.17g}"
    return str(x)


def write_csv(result: SweepResult, stream) -> None:
    """Metadata block of `# key=value` lines, then the data table (LF endings)."""
    for key, value in result.metadata.items():
        stream.write(f"# {key}={value}\n")
    columns = list(CSV_COLUMNS)
    if result.scenario.solver == "both":
        columns += ANALYTIC_COLUMNS
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for rec in result.records:
        writer.writerow([_cell(getattr(rec, col)) for col in columns])


PLOT_TEMPLATE = """\
# plotting script for {csv_name}; run with: python {script_name}
import numpy as np
import matplotlib.pyplot as plt

data = np.genfromtxt({csv_name!r}, delimiter=",", names=True, comments="#", dtype=None, encoding="utf-8")
coord = data["coord"] * {coord_scale!r}
fig, axes = plt.subplots(3, 1, sharex=True, figsize=(5, 8))
for ax, col in zip(axes, ("N_cav", "g2", "P_e")):
    ax.plot(coord, data[col], "-")
    if col + "_analytic" in data.dtype.names:
        ax.plot(coord, data[col + "_analytic"], "--")
    ax.set_ylabel(col)
axes[-1].set_xlabel({xlabel!r})
fig.tight_layout()
fig.savefig({png_name!r}, dpi=150)
"""


def write_plot_script(result: SweepResult, csv_path: Path) -> Path:
    axis = result.scenario.scan_axis
    if axis == "spectral":
        scale, xlabel = 1.0 / result.scenario.atom.natural_linewidth, "Delta_c / gamma_0"
    elif axis == "radial":
        scale, xlabel = 1e9, "r - a (nm)"
    else:
        scale, xlabel = 1e9, "z (nm)"
    script = csv_path.with_suffix(".plot.py")
    script.write_text(
        PLOT_TEMPLATE.format(
            csv_name=csv_path.name,
            script_name=script.name,
            coord_scale=scale,
            xlabel=xlabel,
            png_name=csv_path.with_suffix(".png").name,
        ),
        encoding="utf-8",
        newline="\n",
    )
    return script


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nanofiber-cqed", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a builtin or configured scan")
    run.add_argument("--scenario", help="builtin scenario name (see list-scenarios)")
    run.add_argument("--config", type=Path, help="key=value configuration file")
    run.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    run.add_argument("--out", type=Path, help="output CSV path (default: stdout)")
    run.add_argument("--format", choices=("csv",), default="csv")
    run.add_argument("--workers", type=int, default=1, help="parallel processes over scan points")
    run.add_argument("--plot", action="store_true", help="write a matplotlib script next to the CSV")
    run.add_argument("--check", action="store_true",
                     help="report the max exact-vs-analytic relative gap; exit 0 iff below 1%%")

    sub.add_parser("list-scenarios", help="print builtin scenario names")
    sub.add_parser("selftest", help="run quick invariant checks")
    return parser


def _resolve(args):
    text = ""
    if args.config is not None:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    if not args.scenario and not text.strip() and not args.overrides:
        raise ConfigError("give --scenario and/or --config")
    return parse_config(text, overrides=args.overrides, base=args.scenario)


def _cmd_run(args) -> int:
    scenario = _resolve(args)
    if args.check and scenario.solver != "both":
        scenario = replace(scenario, solver="both")
    log.info("running %s (%d points)", scenario.name, scenario.scan_range[2])
    result = run_scenario(scenario, workers=max(1, args.workers))
    for rec in result.failures:
        log.warning("point %s failed: %s", fmt(rec.coord), rec.error)

    if args.out is not None:
        try:
            args.out.parent.mkdir(parents=True, exist_ok=True)
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                write_csv(result, fh)
        except OSError as exc:
            raise ConfigError(f"cannot write {args.out}: {exc}") from None
        if args.plot:
            write_plot_script(result, args.out)
    elif not args.check:
        buf = io.StringIO()
        write_csv(result, buf)
        sys.stdout.write(buf.getvalue())

    if args.check:
        if result.failures:
            raise SolverError(f"{len(result.failures)} scan points failed")
        n_gap, p_gap = max_relative_gap(result)
        worst = max(n_gap, p_gap)
        print(f"max relative gap N_cav={n_gap:.6g} P_e={p_gap:.6g} (threshold {CHECK_THRESHOLD:g})")
        return EXIT_OK if worst < CHECK_THRESHOLD else EXIT_CHECK_FAILED
    return EXIT_OK


def _cmd_selftest(args) -> int:
    from .selftest import run_all

    ok = True
    for name, passed, detail in run_all():
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
        ok &= passed
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(message)s",
    )
    try:
        if args.command == "list-scenarios":
            for name in builtin_scenarios():
                print(name)
            return EXIT_OK
        if args.command == "selftest":
            return _cmd_selftest(args)
        return _cmd_run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())

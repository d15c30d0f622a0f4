"""Command line interface.

Subcommands: ``simulate`` and ``scaling`` run a JSON scenario, ``region``
scans the waiting-gain condition, ``verify`` runs the oracle-equivalence
suites, and ``chart`` renders a results CSV to SVG.
"""

from __future__ import annotations

import argparse
import csv
import sys
from collections import defaultdict
from pathlib import Path

from . import verify as verify_mod
from .analysis import region_scan, write_region_csv
from .charts import emit_line_chart, emit_region_chart
from .harness import run_scenario, scaling_study, scenario_from_json, write_rows_csv


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("config", help="scenario JSON file")
    sub.add_argument("--out", help="override the configured output CSV path")
    sub.add_argument("--workers", type=int, default=None,
                     help="worker processes (default: MATCHPOOL_WORKERS or all cores)")
    sub.add_argument("--trials", type=int, default=None,
                     help="override the configured trial count")
    sub.add_argument("--timing", action="store_true",
                     help="record wall-clock runtime_ms (breaks byte-stable reruns)")


def _load_config(args) -> "object":
    from dataclasses import replace

    cfg = scenario_from_json(args.config)
    if args.out:
        cfg = replace(cfg, output_path=args.out)
    if args.trials:
        cfg = replace(cfg, trials=args.trials)
    if args.timing:
        cfg = replace(cfg, measure_runtime=True)
    return cfg


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    rows = run_scenario(cfg, workers=args.workers)
    if not cfg.output_path:
        write_rows_csv(rows, "results.csv")
        print("wrote results.csv")
    else:
        print(f"wrote {cfg.output_path}")
    print(f"{len(rows)} runs")
    return 0


def cmd_scaling(args) -> int:
    cfg = _load_config(args)
    result = scaling_study(cfg, workers=args.workers)
    for (a, b), verdict in sorted(result.verdicts.items()):
        print(f"{a} vs {b}: {verdict}")
        for g in result.gaps[(a, b)]:
            lo, hi = g.ci95
            print(
                f"  n={g.n:>6}  gap/n={g.mean_gap_per_n:+.5f}  "
                f"CI95=[{lo:+.5f}, {hi:+.5f}]  trials={g.trials}"
            )
    return 0


def cmd_region(args) -> int:
    points = region_scan(args.p, args.delta)
    write_region_csv(points, args.out)
    satisfied = sum(1 for pt in points if pt.satisfied)
    print(f"wrote {args.out}: {satisfied}/{len(points)} grid cells satisfied")
    if args.chart:
        emit_region_chart(points, args.chart,
                          title=f"waiting-gain region, p={args.p}, delta={args.delta}")
        print(f"wrote {args.chart}")
    return 0


def cmd_verify(args) -> int:
    return 0 if verify_mod.run_all(verbose=True) else 1


def cmd_chart(args) -> int:
    rows = list(csv.DictReader(Path(args.results).open()))
    if not rows:
        print("results file has no rows", file=sys.stderr)
        return 1
    if args.kind == "region":
        from .analysis import RegionPoint

        points = [
            RegionPoint(c=float(r["c"]), rho=float(r["rho"]),
                        lhs=float(r["lhs"]), satisfied=r["satisfied"] == "true")
            for r in rows
        ]
        emit_region_chart(points, args.out)
    else:
        # matched totals vs the long waiting period, one series per scheme
        acc: dict[str, dict[tuple[int, int], list[int]]] = defaultdict(
            lambda: defaultdict(list)
        )
        for r in rows:
            key = (int(r["S_L"]), int(r["n"]))
            label = f"{r['scheme']} n={r['n']}"
            acc[label][key].append(int(r["matched_total"]))
        series = {
            label: [(s_l, sum(v) / len(v)) for (s_l, _n), v in sorted(cells.items())]
            for label, cells in acc.items()
        }
        emit_line_chart(series, args.out, title="matched vs waiting period",
                        x_label="S_L", y_label="mean matched")
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matchpool",
        description="dynamic paired-exchange matching simulator",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sim = subs.add_parser("simulate", help="run a scenario, emit one CSV row per run")
    _add_common(sim)
    sim.set_defaults(fn=cmd_simulate)

    sca = subs.add_parser("scaling", help="run an n-ladder and classify gap trends")
    _add_common(sca)
    sca.set_defaults(fn=cmd_scaling)

    reg = subs.add_parser("region", help="scan the waiting-gain condition")
    reg.add_argument("--p", type=float, required=True)
    reg.add_argument("--delta", type=float, required=True)
    reg.add_argument("--out", required=True, help="output CSV path")
    reg.add_argument("--chart", help="optional SVG raster path")
    reg.set_defaults(fn=cmd_region)

    ver = subs.add_parser("verify", help="run solver-vs-oracle property suites")
    ver.set_defaults(fn=cmd_verify)

    cha = subs.add_parser("chart", help="render a results CSV to SVG")
    cha.add_argument("results")
    cha.add_argument("--kind", choices=("waiting", "region"), default="waiting")
    cha.add_argument("--out", required=True)
    cha.set_defaults(fn=cmd_chart)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())

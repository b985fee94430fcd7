"""Command-line front end: generate, plan, evaluate, sweep, oracle.

Exit codes: 0 success, 2 input validation, 3 infeasibility, 4 size refusal.
Set BCASTPLAN_LOG=debug|info|warning to control log verbosity.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from .area_form import (
    ProfitKind,
    grow_plan,
    grow_plans_for_caps,
    merge_plan,
    merge_plans_for_caps,
)
from .constraints import check_plan
from .metric import ScoreMode, total_score
from .model import (
    MergeInfeasibleError,
    OracleSizeError,
    Plan,
    PlanningError,
)
from .oracle import exhaustive_optimum
from .scenario_io import (
    Scenario,
    ScenarioIOError,
    generate_reference,
    load_plan,
    load_scenario,
    save_plan,
    scenario_bytes,
)

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    "method",
    "profit",
    "max_areas",
    "mode",
    "total",
    "baseline",
    "improvement_abs",
    "improvement_pct",
    "num_areas",
    "mean_area_size",
    "uncovered_cells",
]


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.handler(args)
    except OracleSizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except MergeInfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ScenarioIOError, PlanningError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _setup_logging() -> None:
    level = os.environ.get("BCASTPLAN_LOG", "warning").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bcastplan",
        description="Plan broadcast areas and content over a cell grid.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a scenario file")
    gen.add_argument("--seed", type=int, default=1)
    gen.add_argument("--out", type=Path, help="output path (default stdout)")
    gen.add_argument("--users-per-cell", type=int)
    gen.add_argument("--update-prob", type=float)
    gen.add_argument("--deterministic-split", action="store_true", default=None)
    gen.add_argument("--total-resources", type=int)
    gen.add_argument("--broadcast-cap", type=int)
    gen.add_argument("--max-areas", type=int)
    gen.add_argument("--figures", type=Path, help="also render a demand map here")
    gen.set_defaults(handler=_cmd_generate)

    plan = sub.add_parser("plan", help="form areas and assign content")
    plan.add_argument("--scenario", type=Path, required=True)
    plan.add_argument("--method", choices=["merge", "grow"], required=True)
    plan.add_argument("--profit", choices=["demand", "holistic"], default="demand")
    plan.add_argument("--max-areas", type=int, required=True)
    plan.add_argument("--mode", choices=["normalized", "literal"], default="normalized")
    plan.add_argument("--broadcast-cap", type=int, help="override the scenario cap")
    plan.add_argument("--interest", choices=["sum", "max"], default="sum")
    plan.add_argument("--raw-merge-profit", action="store_true")
    plan.add_argument("--out", type=Path, help="write the plan file here")
    plan.add_argument("--geometry-out", type=Path, help="write a per-cell map CSV")
    plan.add_argument("--figures", type=Path, help="render a plan map here")
    plan.set_defaults(handler=_cmd_plan)

    ev = sub.add_parser("evaluate", help="score a stored plan")
    ev.add_argument("--scenario", type=Path, required=True)
    ev.add_argument("--plan", type=Path, required=True)
    ev.add_argument("--mode", choices=["normalized", "literal"], default="normalized")
    ev.add_argument("--strict", action="store_true",
                    help="literal exactly-one reading of the interference set")
    ev.set_defaults(handler=_cmd_evaluate)

    sweep = sub.add_parser("sweep", help="factorial sweep over methods and caps")
    sweep.add_argument("--scenario", type=Path, required=True)
    sweep.add_argument("--out", type=Path, required=True)
    sweep.add_argument("--max-areas-list", default="5,10,15,20,25,30")
    sweep.add_argument("--methods", default="merge,grow")
    sweep.add_argument("--profits", default="demand,holistic")
    sweep.add_argument("--mode", choices=["normalized", "literal"], default="normalized")
    sweep.add_argument("--figures", type=Path, help="render sweep curves here")
    sweep.set_defaults(handler=_cmd_sweep)

    orc = sub.add_parser("oracle", help="exhaustive optimum vs the heuristics")
    orc.add_argument("--scenario", type=Path, required=True)
    orc.add_argument("--max-areas", type=int, required=True)
    orc.add_argument("--mode", choices=["normalized", "literal"], default="normalized")
    orc.add_argument("--out", type=Path, help="also write the CSV here")
    orc.set_defaults(handler=_cmd_oracle)

    return parser


def _cmd_generate(args: argparse.Namespace) -> int:
    overrides = {}
    for key in (
        "users_per_cell",
        "update_prob",
        "deterministic_split",
        "total_resources",
        "broadcast_cap",
        "max_areas",
    ):
        value = getattr(args, key)
        if value is not None:
            overrides[key] = value
    scenario = generate_reference(args.seed, overrides)
    data = scenario_bytes(scenario)
    if args.out:
        args.out.write_bytes(data)
        logger.info("wrote scenario to %s", args.out)
    else:
        sys.stdout.write(data.decode("utf-8"))
    if args.figures:
        from . import figures

        args.figures.mkdir(parents=True, exist_ok=True)
        figures.demand_map(scenario, args.figures / "demand_map.png")
    return 0


def _mode(args: argparse.Namespace) -> ScoreMode:
    return ScoreMode(args.mode)


def _run_planner(scenario: Scenario, args: argparse.Namespace) -> Plan:
    budget = replace(scenario.budget, max_areas=args.max_areas)
    if getattr(args, "broadcast_cap", None):
        budget = replace(budget, broadcast_cap=args.broadcast_cap)
    kind = ProfitKind(args.profit)
    if args.method == "merge":
        return merge_plan(
            scenario.topology,
            scenario.catalog,
            budget,
            kind,
            _mode(args),
            interest=args.interest,
            raw_profit=args.raw_merge_profit,
        )
    return grow_plan(
        scenario.topology,
        scenario.catalog,
        budget,
        kind,
        _mode(args),
        interest=args.interest,
    )


def _cmd_plan(args: argparse.Namespace) -> int:
    if args.max_areas < 1:
        raise ValueError("--max-areas must be at least 1")
    scenario = load_scenario(args.scenario)
    plan = _run_planner(scenario, args)
    plan = replace(plan, topology_ref=scenario.fingerprint())

    budget = replace(scenario.budget, max_areas=args.max_areas)
    if args.broadcast_cap:
        budget = replace(budget, broadcast_cap=args.broadcast_cap)
    report = total_score(
        scenario.topology, plan, scenario.catalog, budget, _mode(args)
    )
    meta = {
        "method": args.method,
        "profit": args.profit,
        "max_areas": args.max_areas,
        "mode": args.mode,
    }
    if args.out:
        save_plan(plan, args.out, meta)
        logger.info("wrote plan to %s", args.out)
    if args.geometry_out:
        _write_geometry(scenario, plan, args.geometry_out)
    if args.figures:
        from . import figures

        args.figures.mkdir(parents=True, exist_ok=True)
        name = f"map_{args.method}_{args.profit}_{args.max_areas}.png"
        figures.plan_map(
            scenario,
            plan,
            args.figures / name,
            title=f"{args.method}/{args.profit}, cap {args.max_areas}",
        )
    stats = report.stats
    print(
        f"total={report.total:.6f} baseline={report.baseline_total:.6f} "
        f"improvement_abs={report.improvement_abs:.6f} "
        f"improvement_pct={report.improvement_pct:.6f} "
        f"areas={stats.num_areas} mean_area_size={stats.mean_area_size:.6f} "
        f"uncovered={stats.uncovered_cells}"
    )
    return 0


def _write_geometry(scenario: Scenario, plan: Plan, path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["cell_id", "x", "y", "area_id", "content_id"])
        by_cell: dict[int, list] = {c: [] for c in scenario.topology.cells}
        for area in sorted(plan.areas, key=lambda a: a.id):
            for cell in area.members:
                by_cell[cell].append(area)
        for cell in scenario.topology.cells:
            x, y = scenario.coords[cell]
            if not by_cell[cell]:
                writer.writerow([cell, f"{x:.6f}", f"{y:.6f}", "", ""])
            for area in by_cell[cell]:
                writer.writerow(
                    [cell, f"{x:.6f}", f"{y:.6f}", area.id, area.content or ""]
                )


def _score_row(
    scenario: Scenario,
    plan: Plan,
    method: str,
    profit: str,
    max_areas: int | str,
    mode: ScoreMode,
) -> dict:
    cap = max_areas if isinstance(max_areas, int) else scenario.budget.max_areas
    budget = replace(scenario.budget, max_areas=cap)
    report = total_score(scenario.topology, plan, scenario.catalog, budget, mode)
    return {
        "method": method,
        "profit": profit,
        "max_areas": max_areas,
        "mode": mode.value,
        "total": f"{report.total:.6f}",
        "baseline": f"{report.baseline_total:.6f}",
        "improvement_abs": f"{report.improvement_abs:.6f}",
        "improvement_pct": f"{report.improvement_pct:.6f}",
        "num_areas": report.stats.num_areas,
        "mean_area_size": f"{report.stats.mean_area_size:.6f}",
        "uncovered_cells": report.stats.uncovered_cells,
    }


def _cmd_evaluate(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    plan, meta = load_plan(args.plan, scenario)
    budget = scenario.budget
    if meta.get("max_areas"):
        budget = replace(budget, max_areas=int(meta["max_areas"]))
    report = check_plan(
        scenario.topology, plan, scenario.catalog, budget, strict=args.strict
    )
    if not report.ok:
        print("plan is infeasible:", file=sys.stderr)
        for violation in report.violations:
            print(f"  {violation}", file=sys.stderr)
        return 3
    row = _score_row(
        scenario,
        plan,
        meta.get("method") or "",
        meta.get("profit") or "",
        meta.get("max_areas") or "",
        _mode(args),
    )
    writer = csv.DictWriter(sys.stdout, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerow(row)
    return 0


def _parse_csv_list(raw: str, allowed: set[str] | None = None) -> list[str]:
    values = [item.strip() for item in raw.split(",") if item.strip()]
    if not values:
        raise ValueError("empty list argument")
    if allowed is not None:
        for value in values:
            if value not in allowed:
                raise ValueError(f"unexpected value {value!r}")
    return values


def _cmd_sweep(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    methods = _parse_csv_list(args.methods, {"merge", "grow"})
    profits = _parse_csv_list(args.profits, {"demand", "holistic"})
    caps = [int(v) for v in _parse_csv_list(args.max_areas_list)]
    if any(c < 1 for c in caps):
        raise ValueError("area caps must be positive")
    mode = _mode(args)

    plans: dict[tuple[str, str], dict[int, Plan]] = {}
    for method in methods:
        for profit in profits:
            logger.info("sweep: planning %s/%s", method, profit)
            kind = ProfitKind(profit)
            if method == "merge":
                plans[(method, profit)] = merge_plans_for_caps(
                    scenario.topology, scenario.catalog, scenario.budget, caps, kind, mode
                )
            else:
                plans[(method, profit)] = grow_plans_for_caps(
                    scenario.topology, scenario.catalog, scenario.budget, caps, kind, mode
                )

    rows = []
    for method in methods:
        for profit in profits:
            for cap in caps:
                plan = plans[(method, profit)][cap]
                rows.append(_score_row(scenario, plan, method, profit, cap, mode))

    with open(args.out, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    logger.info("wrote %d rows to %s", len(rows), args.out)

    if args.figures:
        from . import figures

        curve_rows = [
            {**row, "max_areas": int(row["max_areas"])} for row in rows
        ]
        figures.sweep_curves(curve_rows, args.figures)
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    if args.max_areas < 1:
        raise ValueError("--max-areas must be at least 1")
    scenario = load_scenario(args.scenario)
    mode = _mode(args)
    budget = replace(scenario.budget, max_areas=args.max_areas)
    best_plan, _ = exhaustive_optimum(
        scenario.topology, scenario.catalog, budget, mode=mode
    )
    oracle_total = total_score(
        scenario.topology, best_plan, scenario.catalog, budget, mode
    ).total

    rows = [
        {
            "planner": "oracle",
            "profit": "",
            "max_areas": args.max_areas,
            "mode": mode.value,
            "total": f"{oracle_total:.6f}",
            "gap_pct": f"{0.0:.6f}",
        }
    ]
    for method in ("merge", "grow"):
        for profit in (ProfitKind.DEMAND, ProfitKind.HOLISTIC):
            planner = merge_plan if method == "merge" else grow_plan
            plan = planner(
                scenario.topology, scenario.catalog, budget, profit, mode
            )
            total = total_score(
                scenario.topology, plan, scenario.catalog, budget, mode
            ).total
            gap = (
                100.0 * (oracle_total - total) / oracle_total
                if oracle_total > 1e-9
                else 0.0
            )
            rows.append(
                {
                    "planner": method,
                    "profit": profit.value,
                    "max_areas": args.max_areas,
                    "mode": mode.value,
                    "total": f"{total:.6f}",
                    "gap_pct": f"{gap:.6f}",
                }
            )

    fieldnames = ["planner", "profit", "max_areas", "mode", "total", "gap_pct"]
    writer = csv.DictWriter(sys.stdout, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as handle:
            file_writer = csv.DictWriter(
                handle, fieldnames=fieldnames, lineterminator="\n"
            )
            file_writer.writeheader()
            file_writer.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())

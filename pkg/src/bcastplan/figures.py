"""Matplotlib figures rendered next to the delimited outputs.

All functions write PNG files and never open interactive windows.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .model import Plan
from .scenario_io import Scenario

_COLOR_CYCLE = (
    "#d62728",
    "#2ca02c",
    "#1f77b4",
    "#ff7f0e",
    "#9467bd",
    "#8c564b",
    "#17becf",
    "#bcbd22",
)


def _item_colors(items: tuple[str, ...]) -> dict[str, str]:
    return {item: _COLOR_CYCLE[i % len(_COLOR_CYCLE)] for i, item in enumerate(items)}


def demand_map(scenario: Scenario, path: str | Path) -> Path:
    """Cells colored by the streaming item their users ask for."""
    colors = _item_colors(scenario.catalog.items)
    fig, ax = plt.subplots(figsize=(6, 6))
    for cell, (x, y) in enumerate(scenario.coords):
        if scenario.region_assignment:
            item = scenario.region_assignment[cell]
        else:
            item = max(
                scenario.catalog.items,
                key=lambda it: scenario.catalog.pop(cell, it),
                default=None,
            )
        ax.scatter(x, y, s=90, color=colors.get(item, "#999999"), zorder=3)
        ax.annotate(str(cell), (x, y), fontsize=6, ha="center", va="center", zorder=4)
    for a, b in sorted(scenario.topology.edges):
        xa, ya = scenario.coords[a]
        xb, yb = scenario.coords[b]
        ax.plot([xa, xb], [ya, yb], color="#cccccc", lw=0.5, zorder=1)
    handles = [
        plt.Line2D([], [], marker="o", ls="", color=c, label=item)
        for item, c in colors.items()
    ]
    ax.legend(handles=handles, fontsize=7, loc="upper right")
    ax.set_aspect("equal")
    ax.set_title(f"demand map (seed {scenario.seed})")
    out = Path(path)
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out


def plan_map(scenario: Scenario, plan: Plan, path: str | Path, title: str = "") -> Path:
    """Cells colored by the content broadcast to them; gray means uncovered."""
    colors = _item_colors(scenario.catalog.items)
    fig, ax = plt.subplots(figsize=(6, 6))
    for a, b in sorted(scenario.topology.edges):
        xa, ya = scenario.coords[a]
        xb, yb = scenario.coords[b]
        ax.plot([xa, xb], [ya, yb], color="#dddddd", lw=0.5, zorder=1)
    # intra-area links make the grouping visible
    for area in plan.areas:
        for a, b in sorted(scenario.topology.edges):
            if a in area.members and b in area.members:
                xa, ya = scenario.coords[a]
                xb, yb = scenario.coords[b]
                ax.plot([xa, xb], [ya, yb], color="#555555", lw=1.6, zorder=2)
    covering: dict[int, str | None] = {}
    for area in sorted(plan.areas, key=lambda ar: ar.id):
        for cell in area.members:
            covering.setdefault(cell, area.content)
    for cell, (x, y) in enumerate(scenario.coords):
        if cell not in covering:
            ax.scatter(x, y, s=70, facecolors="none", edgecolors="#aaaaaa", zorder=3)
        else:
            item = covering[cell]
            ax.scatter(
                x, y, s=90, color=colors.get(item, "#444444"), zorder=3
            )
    ax.set_aspect("equal")
    ax.set_title(title or f"{plan.num_areas} areas")
    out = Path(path)
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out


def sweep_curves(rows: list[dict], out_dir: str | Path) -> list[Path]:
    """Improvement and mean area size against the area cap, one line per
    (method, profit) combination."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    series: dict[tuple[str, str], list[dict]] = {}
    for row in rows:
        series.setdefault((row["method"], row["profit"]), []).append(row)

    written = []
    for metric_key, ylabel, fname in (
        ("improvement_abs", "improvement over no broadcast", "sweep_improvement.png"),
        ("mean_area_size", "mean area size (cells)", "sweep_area_size.png"),
    ):
        fig, ax = plt.subplots(figsize=(6, 4))
        for (method, profit), data in sorted(series.items()):
            data = sorted(data, key=lambda r: r["max_areas"])
            ax.plot(
                [r["max_areas"] for r in data],
                [float(r[metric_key]) for r in data],
                marker="o",
                label=f"{method}/{profit}",
            )
        ax.set_xlabel("maximum number of areas")
        ax.set_ylabel(ylabel)
        ax.legend(fontsize=8)
        ax.grid(alpha=0.3)
        out = out_dir / fname
        fig.savefig(out, dpi=150, bbox_inches="tight")
        plt.close(fig)
        written.append(out)
    return written

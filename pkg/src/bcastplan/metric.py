"""Per-cell and plan-wide satisfaction scoring.

The score of a cell combines users served by broadcast (each fully
satisfied) with the unicast capacity left after the areas around the cell
take their share. Two modes exist:

* ``LITERAL`` adds the raw ratio of leftover resources to the resources the
  remaining users would need, which is unitless and can exceed the number
  of remaining users.
* ``NORMALIZED`` (the default everywhere) clamps that ratio at 1 and scales
  it by the remaining user count, so the cell score stays between 0 and the
  cell's population whenever interest does not exceed the population.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping

from .constraints import interference_areas
from .model import (
    Budget,
    ContentCatalog,
    Plan,
    TOLERANCE,
    Topology,
    covered_cells,
    empty_plan,
)


class ScoreMode(enum.Enum):
    LITERAL = "literal"
    NORMALIZED = "normalized"


@dataclass(frozen=True)
class PlanStats:
    num_areas: int
    mean_area_size: float
    uncovered_cells: int


@dataclass(frozen=True)
class ScoreReport:
    per_cell: Mapping[int, float]
    total: float
    baseline_total: float
    improvement_abs: float
    improvement_pct: float
    stats: PlanStats


def cell_score(
    topology: Topology,
    plan: Plan,
    catalog: ContentCatalog,
    budget: Budget,
    cell: int,
    mode: ScoreMode = ScoreMode.NORMALIZED,
    strict: bool = False,
) -> float:
    """Average number of satisfied users in one cell under the given plan."""
    topology.require_cell(cell)
    active = plan.active_areas()
    broadcast = {a.content for a in active if cell in a.members}
    used = sum(a.usage for a in interference_areas(topology, plan, cell, strict))
    avail = max(0.0, float(budget.total - used))

    served = sum(catalog.pop(cell, item) for item in broadcast)
    need = catalog.unicast_pop(cell) * catalog.unicast_blocks(cell)
    remaining = catalog.unicast_pop(cell)
    for item in catalog.items:
        if item in broadcast:
            continue
        count = catalog.pop(cell, item)
        if count:
            need += count * catalog.blocks(cell, item)
            remaining += count

    if mode is ScoreMode.LITERAL:
        unicast = avail / need if need > TOLERANCE else 0.0
    else:
        unicast = (
            min(1.0, avail / need) * remaining if need > TOLERANCE else float(remaining)
        )
    return served + unicast


def plan_stats(topology: Topology, plan: Plan) -> PlanStats:
    sizes = [len(a.members) for a in plan.areas]
    mean = sum(sizes) / len(sizes) if sizes else 0.0
    uncovered = topology.num_cells - len(covered_cells(plan))
    return PlanStats(
        num_areas=plan.num_areas, mean_area_size=mean, uncovered_cells=uncovered
    )


def total_score(
    topology: Topology,
    plan: Plan,
    catalog: ContentCatalog,
    budget: Budget,
    mode: ScoreMode = ScoreMode.NORMALIZED,
    strict: bool = False,
) -> ScoreReport:
    """Plan-wide score with the no-broadcast baseline for comparison."""
    per_cell = {
        cell: cell_score(topology, plan, catalog, budget, cell, mode, strict)
        for cell in topology.cells
    }
    total = 0.0
    for cell in topology.cells:
        total += per_cell[cell]

    baseline = 0.0
    empty = empty_plan(plan.topology_ref)
    for cell in topology.cells:
        baseline += cell_score(topology, empty, catalog, budget, cell, mode, strict)

    improvement = total - baseline
    pct = 100.0 * improvement / baseline if baseline > TOLERANCE else 0.0
    return ScoreReport(
        per_cell=per_cell,
        total=total,
        baseline_total=baseline,
        improvement_abs=improvement,
        improvement_pct=pct,
        stats=plan_stats(topology, plan),
    )

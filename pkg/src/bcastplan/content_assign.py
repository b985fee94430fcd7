"""Greedy content-to-area assignment.

Given fixed area memberships, areas are ranked by the number of users
interested in broadcastable content and processed in that order. Each area
gets the viable item (one that fits the interference budget next to the
areas already settled) that maximizes the plan-wide score; when nothing is
viable the area is left inactive. Decisions are never revisited, so the
first-processed area always receives its unconstrained best item.
"""

from __future__ import annotations

from dataclasses import replace

from .engine import ScoreEngine
from .metric import ScoreMode
from .model import Budget, ContentCatalog, MAX_AREAS_STANDARD, Plan, Topology, members_connected


def assign_content(
    topology: Topology,
    plan: Plan,
    catalog: ContentCatalog,
    budget: Budget,
    mode: ScoreMode = ScoreMode.NORMALIZED,
    *,
    interest: str = "sum",
    strict: bool = False,
    validate: bool = True,
) -> Plan:
    """Return ``plan`` with content and tight usage chosen for each area.

    Any content already present on the input areas is discarded and
    recomputed, which lets callers re-run the assignment over provisional
    memberships. Areas that admit no viable item become inactive
    (``content=None, usage=0``). The result lists areas in id order, so the
    output does not depend on the input ordering.

    ``interest`` selects the ranking rule: ``"sum"`` ranks areas by total
    interested users over all items, ``"max"`` by the best single item.
    """
    if interest not in ("sum", "max"):
        raise ValueError("interest must be 'sum' or 'max'")
    if validate:
        if plan.num_areas > min(budget.max_areas, MAX_AREAS_STANDARD):
            raise ValueError("plan exceeds the allowed number of areas")
        for area in plan.areas:
            if not members_connected(topology, area.members):
                raise ValueError(f"area {area.id} is not contiguous")

    engine = ScoreEngine(topology, catalog, budget, mode, strict)
    memberships = [(a.id, a.members) for a in plan.areas]
    decisions, _ = engine.assign(memberships, interest)

    areas = tuple(
        replace(area, content=decisions[area.id][0], usage=decisions[area.id][1])
        for area in sorted(plan.areas, key=lambda a: a.id)
    )
    return Plan(areas=areas, topology_ref=plan.topology_ref)

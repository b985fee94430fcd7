"""Feasibility checks for plans.

Three resource constraints are enforced: every area must use enough blocks
to stream its content in each member cell, the areas a cell belongs to must
fit in the broadcast cap, and the areas touching a cell's closed
neighborhood must fit in the cap as well so a disjoint schedule exists.
Plan-level checks add the area-count cap and per-area contiguity.

Areas without content and with zero usage are inactive and are skipped by
every check; a contentless area with nonzero usage raises
:class:`~bcastplan.model.MissingContentError`.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    Area,
    Budget,
    ContentCatalog,
    MAX_AREAS_STANDARD,
    Plan,
    Topology,
    closed_neighborhood,
    members_connected,
)

STREAM_MIN = "STREAM_MIN"
CELL_BUDGET = "CELL_BUDGET"
NEIGHBOR_BUDGET = "NEIGHBOR_BUDGET"
AREA_COUNT = "AREA_COUNT"
CONTIGUITY = "CONTIGUITY"


@dataclass(frozen=True)
class Violation:
    """One constraint breach: what, where, how much, against which bound."""

    kind: str
    subject: str
    measured: float
    bound: float

    def __str__(self) -> str:
        return f"{self.kind} at {self.subject}: measured {self.measured:g}, bound {self.bound:g}"


@dataclass(frozen=True)
class FeasibilityReport:
    ok: bool
    violations: tuple[Violation, ...]

    @classmethod
    def from_violations(cls, violations: list[Violation]) -> "FeasibilityReport":
        return cls(ok=not violations, violations=tuple(violations))


def interference_areas(
    topology: Topology, plan: Plan, cell: int, strict: bool = False
) -> tuple[Area, ...]:
    """Active areas whose members intersect the closed neighborhood of ``cell``.

    With ``strict=True`` an area counts only when exactly one cell of the
    closed neighborhood belongs to it (the literal reading of the
    interference sum); the default counts any overlap.
    """
    zone = closed_neighborhood(topology, cell)
    selected = []
    for area in plan.active_areas():
        overlap = len(zone & area.members)
        if (overlap == 1) if strict else (overlap >= 1):
            selected.append(area)
    return tuple(selected)


def check_stream_min(plan: Plan, catalog: ContentCatalog) -> FeasibilityReport:
    """Every active area must use at least the demand of each member cell."""
    violations: list[Violation] = []
    for area in plan.active_areas():
        for cell in sorted(area.members):
            blocks = catalog.blocks(cell, area.content)
            if blocks is None:
                violations.append(
                    Violation(
                        STREAM_MIN,
                        f"area:{area.id}/cell:{cell}",
                        float(area.usage),
                        float("inf"),
                    )
                )
            elif area.usage < blocks:
                violations.append(
                    Violation(
                        STREAM_MIN,
                        f"area:{area.id}/cell:{cell}",
                        float(area.usage),
                        float(blocks),
                    )
                )
    return FeasibilityReport.from_violations(violations)


def check_cell_budget(plan: Plan, budget: Budget) -> FeasibilityReport:
    """Per cell, the usage of the areas it belongs to must fit the cap."""
    load: dict[int, int] = {}
    for area in plan.active_areas():
        for cell in area.members:
            load[cell] = load.get(cell, 0) + area.usage
    violations = [
        Violation(CELL_BUDGET, f"cell:{cell}", float(total), float(budget.broadcast_cap))
        for cell, total in sorted(load.items())
        if total > budget.broadcast_cap
    ]
    return FeasibilityReport.from_violations(violations)


def check_neighbor_budget(
    topology: Topology, plan: Plan, budget: Budget, strict: bool = False
) -> FeasibilityReport:
    """Per cell, areas touching its closed neighborhood must fit the cap.

    This implies :func:`check_cell_budget` because a cell belongs to its own
    closed neighborhood.
    """
    violations: list[Violation] = []
    for cell in topology.cells:
        total = sum(
            a.usage for a in interference_areas(topology, plan, cell, strict)
        )
        if total > budget.broadcast_cap:
            violations.append(
                Violation(
                    NEIGHBOR_BUDGET,
                    f"cell:{cell}",
                    float(total),
                    float(budget.broadcast_cap),
                )
            )
    return FeasibilityReport.from_violations(violations)


def check_plan(
    topology: Topology,
    plan: Plan,
    catalog: ContentCatalog,
    budget: Budget,
    strict: bool = False,
) -> FeasibilityReport:
    """All constraint checks plus the area-count cap and contiguity."""
    violations: list[Violation] = []
    cap = min(budget.max_areas, MAX_AREAS_STANDARD)
    if plan.num_areas > cap:
        violations.append(
            Violation(AREA_COUNT, "plan", float(plan.num_areas), float(cap))
        )
    for area in plan.areas:
        for cell in area.members:
            topology.require_cell(cell)
        if not members_connected(topology, area.members):
            components = _component_count(topology, area.members)
            violations.append(
                Violation(CONTIGUITY, f"area:{area.id}", float(components), 1.0)
            )
    violations.extend(check_stream_min(plan, catalog).violations)
    violations.extend(check_cell_budget(plan, budget).violations)
    violations.extend(check_neighbor_budget(topology, plan, budget, strict).violations)
    return FeasibilityReport.from_violations(violations)


def _component_count(topology: Topology, members: frozenset[int]) -> int:
    remaining = set(members)
    count = 0
    while remaining:
        count += 1
        frontier = [min(remaining)]
        remaining.discard(frontier[0])
        while frontier:
            cell = frontier.pop()
            for neighbor in topology.adjacent(cell):
                if neighbor in remaining:
                    remaining.discard(neighbor)
                    frontier.append(neighbor)
    return count

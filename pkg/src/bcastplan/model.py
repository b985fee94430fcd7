"""Core domain types and topology queries for broadcast-area planning.

All types are immutable after construction. Cell identifiers are dense
integers 0..n-1; every argmax in the planner breaks ties toward the lowest
identifier (lexicographically for pairs) so runs are reproducible.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass, field
from typing import Iterable, Mapping

#: Numeric tolerance for score and profit comparisons (double precision).
TOLERANCE = 1e-9

#: Standard cap on simultaneously configured broadcast areas per region.
MAX_AREAS_STANDARD = 256


class PlanningError(Exception):
    """Base class for domain errors raised by the planner."""


class UnknownCellError(PlanningError):
    """A cell identifier does not exist in the topology."""


class MissingContentError(PlanningError):
    """An area takes part in resource accounting without assigned content."""


class MergeInfeasibleError(PlanningError):
    """The merge heuristic cannot reach the requested area count."""


class OracleSizeError(PlanningError):
    """The exhaustive search was refused because the instance is too large."""

    def __init__(self, message: str, estimate: int):
        super().__init__(message)
        self.estimate = estimate


@dataclass(frozen=True)
class Topology:
    """Cell graph: dense cell ids, symmetric adjacency, per-cell user counts.

    ``edges`` holds unordered pairs stored as (low, high) tuples; a cell is
    always part of its own closed neighborhood even though no self-loop is
    stored.
    """

    cells: tuple[int, ...]
    edges: frozenset[tuple[int, int]]
    users_per_cell: tuple[int, ...]
    _adjacency: tuple[frozenset[int], ...] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        n = len(self.cells)
        if tuple(self.cells) != tuple(range(n)):
            raise ValueError("cell ids must be the dense sequence 0..n-1")
        if len(self.users_per_cell) != n:
            raise ValueError("users_per_cell must cover every cell")
        if any(u < 0 for u in self.users_per_cell):
            raise ValueError("user counts must be non-negative")
        adjacency: list[set[int]] = [set() for _ in range(n)]
        for edge in self.edges:
            a, b = edge
            if a == b:
                raise ValueError(f"self-loop on cell {a} is not allowed")
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge {edge} references an unknown cell")
            if edge != (min(a, b), max(a, b)):
                raise ValueError(f"edge {edge} must be stored as (low, high)")
            adjacency[a].add(b)
            adjacency[b].add(a)
        object.__setattr__(
            self, "_adjacency", tuple(frozenset(s) for s in adjacency)
        )

    @classmethod
    def build(
        cls,
        num_cells: int,
        edges: Iterable[tuple[int, int]],
        users_per_cell: Iterable[int],
    ) -> "Topology":
        """Normalize edge tuples and construct a validated topology."""
        normalized = frozenset(
            (min(a, b), max(a, b)) for a, b in edges
        )
        return cls(tuple(range(num_cells)), normalized, tuple(users_per_cell))

    @property
    def num_cells(self) -> int:
        return len(self.cells)

    def adjacent(self, cell: int) -> frozenset[int]:
        """Open neighborhood of ``cell`` (does not include the cell itself)."""
        self.require_cell(cell)
        return self._adjacency[cell]

    def total_users(self) -> int:
        return sum(self.users_per_cell)

    def require_cell(self, cell: int) -> None:
        try:
            index = operator.index(cell)
        except TypeError:
            raise UnknownCellError(f"unknown cell id {cell!r}") from None
        if not 0 <= index < self.num_cells:
            raise UnknownCellError(f"unknown cell id {cell!r}")


@dataclass(frozen=True)
class ContentCatalog:
    """Broadcastable items with per-cell popularity and resource demand.

    ``popularity[(c, m)]`` is the number of users in cell c interested in
    item m (missing entries mean zero). ``demand[(c, m)]`` is the number of
    resource blocks needed to stream m in c; a missing entry means the item
    cannot be broadcast in that cell. ``unicast_users`` and
    ``unicast_demand`` describe background unicast traffic per cell
    (resource blocks per user), both defaulting to zero.
    """

    items: tuple[str, ...]
    popularity: Mapping[tuple[int, str], int]
    demand: Mapping[tuple[int, str], int]
    unicast_users: Mapping[int, int] = field(default_factory=dict)
    unicast_demand: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(set(self.items)) != len(self.items):
            raise ValueError("duplicate content ids in catalog")
        known = set(self.items)
        for (cell, item), count in self.popularity.items():
            if item not in known:
                raise ValueError(f"popularity references unknown item {item!r}")
            if count < 0:
                raise ValueError(f"negative popularity for ({cell}, {item})")
            if count > 0 and self.demand.get((cell, item), 0) <= 0:
                raise ValueError(
                    f"item {item!r} is demanded in cell {cell} but has no "
                    "positive resource demand"
                )
        for (cell, item), blocks in self.demand.items():
            if item not in known:
                raise ValueError(f"demand references unknown item {item!r}")
            if blocks <= 0:
                raise ValueError(f"resource demand must be positive for ({cell}, {item})")

    def pop(self, cell: int, item: str) -> int:
        return self.popularity.get((cell, item), 0)

    def blocks(self, cell: int, item: str) -> int | None:
        """Resource blocks needed to stream ``item`` in ``cell``; None if unknown."""
        return self.demand.get((cell, item))

    def unicast_pop(self, cell: int) -> int:
        return self.unicast_users.get(cell, 0)

    def unicast_blocks(self, cell: int) -> float:
        return self.unicast_demand.get(cell, 0.0)

    def cell_interest(self, cell: int) -> int:
        """Total users of ``cell`` interested in any broadcastable item."""
        return sum(self.pop(cell, item) for item in self.items)


@dataclass(frozen=True)
class Budget:
    """Per-frame resource budget and the area-count cap."""

    total: int
    broadcast_cap: int
    max_areas: int

    def __post_init__(self) -> None:
        if self.total <= 0:
            raise ValueError("total resources must be positive")
        if not (0 < self.broadcast_cap <= self.total):
            raise ValueError("broadcast cap must be in 1..total")
        if not (0 < self.max_areas <= MAX_AREAS_STANDARD):
            raise ValueError(
                f"max_areas must be in 1..{MAX_AREAS_STANDARD}"
            )


@dataclass(frozen=True)
class Area:
    """A broadcast area: member cells, optional content, resource usage.

    An area with ``content is None`` and ``usage == 0`` is inactive: it stays
    in the plan for reporting but contributes nothing to constraints or
    scores.
    """

    id: int
    members: frozenset[int]
    content: str | None = None
    usage: int = 0

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("an area must contain at least one cell")
        if self.usage < 0:
            raise ValueError("resource usage must be non-negative")

    @property
    def active(self) -> bool:
        return self.content is not None


@dataclass(frozen=True)
class Plan:
    """An ordered collection of areas bound to a topology/catalog pair."""

    areas: tuple[Area, ...]
    topology_ref: str = ""

    def __post_init__(self) -> None:
        ids = [a.id for a in self.areas]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate area ids in plan")

    @property
    def num_areas(self) -> int:
        return len(self.areas)

    def active_areas(self) -> tuple[Area, ...]:
        """Areas that broadcast content. Raises if a contentless area claims resources."""
        for area in self.areas:
            if area.content is None and area.usage > 0:
                raise MissingContentError(
                    f"area {area.id} uses {area.usage} blocks without content"
                )
        return tuple(a for a in self.areas if a.active)


def empty_plan(topology_ref: str = "") -> Plan:
    return Plan(areas=(), topology_ref=topology_ref)


def closed_neighborhood(topology: Topology, cell: int) -> frozenset[int]:
    """The cell itself plus every adjacent cell."""
    topology.require_cell(cell)
    return topology.adjacent(cell) | {cell}


def areas_adjacent(topology: Topology, a1: Area, a2: Area) -> bool:
    """True when the areas share a cell or touch across an edge."""
    if a1.members & a2.members:
        return True
    for cell in a1.members:
        if topology.adjacent(cell) & a2.members:
            return True
    return False


def covered_cells(plan: Plan) -> frozenset[int]:
    """Union of all member sets, including inactive areas."""
    covered: set[int] = set()
    for area in plan.areas:
        covered |= area.members
    return frozenset(covered)


def uncovered_cells(plan: Plan, topology: Topology) -> frozenset[int]:
    return frozenset(topology.cells) - covered_cells(plan)


def members_connected(topology: Topology, members: frozenset[int]) -> bool:
    """Breadth-first check that ``members`` induce a connected subgraph."""
    if not members:
        return True
    for cell in members:
        topology.require_cell(cell)
    start = min(members)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt: list[int] = []
        for cell in frontier:
            for neighbor in topology.adjacent(cell):
                if neighbor in members and neighbor not in seen:
                    seen.add(neighbor)
                    nxt.append(neighbor)
        frontier = nxt
    return len(seen) == len(members)

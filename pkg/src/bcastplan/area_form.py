"""Area formation heuristics: merge and grow, with pluggable profits.

The merge approach starts from one singleton area per cell and repeatedly
unions the adjacent pair with the best profit. It stops once the area count
fits the cap and no merge is profitable; above the cap it keeps merging the
least-bad pair, so the output always partitions the cell set.

The grow approach repeatedly seeds a new area at the cell with the best
creation profit and extends it cell by cell while additions stay
profitable and feasible. Areas may overlap and cells may stay uncovered.

Profits come in two kinds. Demand profits look at popularity counts only
and are cheap. Holistic profits apply the candidate action to a copy of
the membership structure, re-run the content assignment, and score the
difference, so they price interference as well.

Both heuristics pick actions independently of the area cap (the cap only
decides when to stop), so one pass can serve a whole sweep of caps; see
:func:`merge_plans_for_caps` and :func:`grow_plans_for_caps`.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, replace

from .content_assign import assign_content
from .engine import Membership, ScoreEngine
from .metric import ScoreMode
from .model import (
    Area,
    Budget,
    ContentCatalog,
    MAX_AREAS_STANDARD,
    MergeInfeasibleError,
    MissingContentError,
    Plan,
    TOLERANCE,
    Topology,
    members_connected,
)

logger = logging.getLogger(__name__)

NEG_INF = float("-inf")


class ProfitKind(enum.Enum):
    DEMAND = "demand"
    HOLISTIC = "holistic"


@dataclass(frozen=True)
class Action:
    """A candidate planning step, optionally annotated with its profit."""

    kind: str  # "merge" | "create" | "add"
    cell: int | None = None
    area1: int | None = None
    area2: int | None = None
    profit: float = NEG_INF
    feasible: bool = False

    @classmethod
    def merge(cls, area1: int, area2: int) -> "Action":
        return cls(kind="merge", area1=area1, area2=area2)

    @classmethod
    def create(cls, cell: int) -> "Action":
        return cls(kind="create", cell=cell)

    @classmethod
    def add(cls, cell: int, area: int) -> "Action":
        return cls(kind="add", cell=cell, area1=area)


# ---------------------------------------------------------------------------
# demand-based profits


def pr_merge_demand(
    topology: Topology, a1: Area, a2: Area, catalog: ContentCatalog
) -> float:
    """Shared-interest alignment of the union: best single-item popularity
    over both areas divided by their combined population. Zero population
    gives zero profit."""
    union = a1.members | a2.members
    users = sum(topology.users_per_cell[c] for c in a1.members)
    users += sum(topology.users_per_cell[c] for c in a2.members)
    if users <= 0:
        return 0.0
    best = max(
        (sum(catalog.pop(c, item) for c in union) for item in catalog.items),
        default=0,
    )
    return best / users


def pr_create_demand(cell: int, catalog: ContentCatalog, plan_so_far: Plan) -> float:
    """Best residual (not yet broadcast at the cell) item popularity."""
    covered = {
        a.content for a in plan_so_far.areas if a.content is not None and cell in a.members
    }
    value, _ = _residual_best(catalog, cell, covered)
    return float(value)


def pr_add_demand(cell: int, area: Area, catalog: ContentCatalog) -> float:
    """Popularity in ``cell`` of the content the area already carries."""
    if area.content is None:
        raise MissingContentError(
            f"area {area.id} needs provisional content before add profits"
        )
    return float(catalog.pop(cell, area.content))


def _residual_best(
    catalog: ContentCatalog, cell: int, covered: set[str]
) -> tuple[int, str | None]:
    best_value = 0
    best_item = None
    for item in catalog.items:
        if item in covered:
            continue
        count = catalog.pop(cell, item)
        if count > best_value:
            best_value = count
            best_item = item
    return best_value, best_item


# ---------------------------------------------------------------------------
# holistic profit


def pr_holistic(
    action: Action,
    topology: Topology,
    plan: Plan,
    catalog: ContentCatalog,
    budget: Budget,
    mode: ScoreMode = ScoreMode.NORMALIZED,
) -> float:
    """Score delta of applying ``action``, re-running content assignment on
    both sides. Returns -inf when the action breaks the area-count cap or
    contiguity, or when the new or merged area cannot stream any item."""
    engine = ScoreEngine(topology, catalog, budget, mode)
    memberships = [(a.id, a.members) for a in plan.areas]
    new_memberships, changed = _apply_action(memberships, action)
    if new_memberships is None:
        return NEG_INF
    if new_memberships == memberships:
        return 0.0
    if len(new_memberships) > min(budget.max_areas, MAX_AREAS_STANDARD):
        return NEG_INF
    if changed is not None:
        if not members_connected(topology, changed):
            return NEG_INF
        if not engine.feasible_content_exists(changed):
            return NEG_INF
    base = engine.assign_total(memberships)
    return engine.assign_total(new_memberships) - base


def _apply_action(
    memberships: list[Membership], action: Action
) -> tuple[list[Membership] | None, frozenset[int] | None]:
    """Apply the action to a copy of the membership list.

    Returns (new memberships, changed member set), or (None, None) when the
    action references unknown areas. A merge of an area with itself leaves
    the structure unchanged.
    """
    by_id = dict(memberships)
    if action.kind == "create":
        new_id = max(by_id, default=-1) + 1
        members = frozenset({action.cell})
        return memberships + [(new_id, members)], members
    if action.kind == "merge":
        if action.area1 not in by_id or action.area2 not in by_id:
            return None, None
        if action.area1 == action.area2:
            return list(memberships), None
        keep, drop = sorted((action.area1, action.area2))
        union = by_id[keep] | by_id[drop]
        out = [
            (aid, union if aid == keep else members)
            for aid, members in memberships
            if aid != drop
        ]
        return out, union
    if action.kind == "add":
        if action.area1 not in by_id:
            return None, None
        union = by_id[action.area1] | {action.cell}
        out = [
            (aid, union if aid == action.area1 else members)
            for aid, members in memberships
        ]
        return out, union
    raise ValueError(f"unknown action kind {action.kind!r}")


# ---------------------------------------------------------------------------
# merge approach


def merge_plan(
    topology: Topology,
    catalog: ContentCatalog,
    budget: Budget,
    profit_kind: ProfitKind,
    mode: ScoreMode = ScoreMode.NORMALIZED,
    *,
    interest: str = "sum",
    raw_profit: bool = False,
    strict: bool = False,
) -> Plan:
    """Run the merge heuristic for a single area cap."""
    plans = merge_plans_for_caps(
        topology,
        catalog,
        budget,
        [budget.max_areas],
        profit_kind,
        mode,
        interest=interest,
        raw_profit=raw_profit,
        strict=strict,
    )
    return plans[budget.max_areas]


def merge_plans_for_caps(
    topology: Topology,
    catalog: ContentCatalog,
    budget: Budget,
    caps: list[int],
    profit_kind: ProfitKind,
    mode: ScoreMode = ScoreMode.NORMALIZED,
    *,
    interest: str = "sum",
    raw_profit: bool = False,
    strict: bool = False,
) -> dict[int, Plan]:
    """One merge walk shared by several area caps.

    Pair selection never looks at the cap, so every cap stops somewhere
    along the same merge trajectory; this evaluates the walk once and cuts
    it at each cap's stopping point.
    """
    caps = sorted(set(int(c) for c in caps))
    if not caps or caps[0] < 1:
        raise ValueError("area caps must be positive")
    engine = ScoreEngine(topology, catalog, budget, mode, strict)
    membership: list[Membership] = [
        (cell, frozenset({cell})) for cell in topology.cells
    ]
    pending = set(caps)
    snapshots: dict[int, list[Membership]] = {}

    while pending:
        best_pair, best_profit = _best_merge_pair(
            engine, membership, profit_kind, raw_profit, interest
        )
        count = len(membership)
        for cap in sorted(pending, reverse=True):
            # The raw merge profit never goes negative, so that variant
            # simply stops once the count fits the cap.
            if count <= cap and (raw_profit or best_profit <= TOLERANCE):
                snapshots[cap] = list(membership)
                pending.discard(cap)
        if not pending:
            break
        if best_pair is None:
            wanted = min(pending)
            raise MergeInfeasibleError(
                f"cannot merge below {count} areas (cap {wanted}); the "
                "topology has more connected components than allowed areas"
            )
        membership = _merge_pair(membership, best_pair)
        logger.debug("merged pair %s, %d areas left", best_pair, len(membership))

    plans: dict[int, Plan] = {}
    for cap, snap in snapshots.items():
        skeleton = Plan(tuple(Area(id=aid, members=m) for aid, m in snap))
        plans[cap] = assign_content(
            topology,
            skeleton,
            catalog,
            replace(budget, max_areas=cap),
            mode,
            interest=interest,
            strict=strict,
            validate=False,
        )
    return plans


def _best_merge_pair(
    engine: ScoreEngine,
    membership: list[Membership],
    profit_kind: ProfitKind,
    raw_profit: bool,
    interest: str,
) -> tuple[tuple[int, int] | None, float]:
    pairs = _adjacent_pairs(engine, membership)
    if not pairs:
        return None, NEG_INF
    base = (
        engine.assign_total(membership, interest)
        if profit_kind is ProfitKind.HOLISTIC
        else 0.0
    )
    by_id = dict(membership)
    best_pair: tuple[int, int] | None = None
    best_profit = NEG_INF
    for pair in pairs:
        id1, id2 = pair
        union = by_id[id1] | by_id[id2]
        if not engine.feasible_content_exists(union):
            profit = NEG_INF
        elif profit_kind is ProfitKind.DEMAND:
            profit = _demand_merge_profit(engine, by_id[id1], by_id[id2], union, raw_profit)
        else:
            probe = [
                (aid, union if aid == id1 else members)
                for aid, members in membership
                if aid != id2
            ]
            profit = engine.assign_total(probe, interest) - base
        if profit > best_profit:
            best_profit = profit
            best_pair = pair
    if best_pair is None:
        # Every pair is gated; forced merges below the cap still need a
        # choice, so fall back to the lexicographically smallest pair (the
        # union simply stays inactive).
        best_pair = pairs[0]
    return best_pair, best_profit


def _demand_merge_profit(
    engine: ScoreEngine,
    members1: frozenset[int],
    members2: frozenset[int],
    union: frozenset[int],
    raw_profit: bool,
) -> float:
    """Alignment of the merged pair, by default net of what the two areas
    already align on their own. The raw variant is the plain merged
    alignment, which is never negative and therefore merges until the cap."""
    info1 = engine.area_info(members1)
    info2 = engine.area_info(members2)
    users = info1.users + info2.users
    if users <= 0:
        return 0.0
    top_union = engine.area_info(union).interest_top
    if raw_profit:
        return top_union / users
    return (top_union - info1.interest_top - info2.interest_top) / users


def _adjacent_pairs(
    engine: ScoreEngine, membership: list[Membership]
) -> list[tuple[int, int]]:
    ordered = sorted(membership)
    pairs: list[tuple[int, int]] = []
    for i, (id1, members1) in enumerate(ordered):
        zone = engine.area_info(members1).zone_any
        for id2, members2 in ordered[i + 1 :]:
            if zone[engine.area_info(members2).member_idx].any():
                pairs.append((id1, id2))
    return pairs


def _merge_pair(
    membership: list[Membership], pair: tuple[int, int]
) -> list[Membership]:
    keep, drop = pair
    by_id = dict(membership)
    union = by_id[keep] | by_id[drop]
    return [
        (aid, union if aid == keep else members)
        for aid, members in membership
        if aid != drop
    ]


# ---------------------------------------------------------------------------
# grow approach


def grow_plan(
    topology: Topology,
    catalog: ContentCatalog,
    budget: Budget,
    profit_kind: ProfitKind,
    mode: ScoreMode = ScoreMode.NORMALIZED,
    *,
    interest: str = "sum",
    strict: bool = False,
) -> Plan:
    """Run the grow heuristic for a single area cap."""
    plans = grow_plans_for_caps(
        topology,
        catalog,
        budget,
        [budget.max_areas],
        profit_kind,
        mode,
        interest=interest,
        strict=strict,
    )
    return plans[budget.max_areas]


def grow_plans_for_caps(
    topology: Topology,
    catalog: ContentCatalog,
    budget: Budget,
    caps: list[int],
    profit_kind: ProfitKind,
    mode: ScoreMode = ScoreMode.NORMALIZED,
    *,
    interest: str = "sum",
    strict: bool = False,
) -> dict[int, Plan]:
    """One grow walk shared by several area caps.

    Seeding and growth never look at the cap, so the area sequence for a
    small cap is a prefix of the sequence for a larger one.
    """
    caps = sorted(set(int(c) for c in caps))
    if not caps or caps[0] < 1:
        raise ValueError("area caps must be positive")
    engine = ScoreEngine(topology, catalog, budget, mode, strict)
    sequence = _grow_sequence(engine, topology, catalog, profit_kind, caps[-1], interest)

    plans: dict[int, Plan] = {}
    for cap in caps:
        prefix = sequence[:cap]
        skeleton = Plan(tuple(Area(id=aid, members=m) for aid, m in prefix))
        plans[cap] = assign_content(
            topology,
            skeleton,
            catalog,
            replace(budget, max_areas=cap),
            mode,
            interest=interest,
            strict=strict,
            validate=False,
        )
    return plans


def _grow_sequence(
    engine: ScoreEngine,
    topology: Topology,
    catalog: ContentCatalog,
    profit_kind: ProfitKind,
    max_areas: int,
    interest: str,
) -> list[Membership]:
    """Create areas one by one until the cap or until seeding pays nothing."""
    n = topology.num_cells
    sequence: list[Membership] = []
    provisional: list[tuple[frozenset[int], str, int]] = []  # demand bookkeeping

    while len(sequence) < max_areas:
        next_id = len(sequence)
        if profit_kind is ProfitKind.DEMAND:
            seeded = _seed_demand(engine, catalog, provisional, n)
        else:
            seeded = _seed_holistic(engine, sequence, next_id, n, interest)
        if seeded is None:
            break
        sequence.append((next_id, seeded[0]))
        if profit_kind is ProfitKind.DEMAND:
            provisional.append(seeded)
        logger.debug("grew area %d with %d cells", next_id, len(seeded[0]))
    return sequence


def _seed_demand(
    engine: ScoreEngine,
    catalog: ContentCatalog,
    provisional: list[tuple[frozenset[int], str, int]],
    n: int,
) -> tuple[frozenset[int], str, int] | None:
    fixed = engine.fixed_load([(members, usage) for members, _, usage in provisional])

    best_profit = 0.0
    best_cell = None
    best_item = None
    for cell in range(n):
        covered = {
            item for members, item, _ in provisional if cell in members
        }
        value, item = _residual_best(catalog, cell, covered)
        if value <= 0:
            continue
        profit = (
            float(value)
            if engine.feasible_content_exists(frozenset({cell}), fixed)
            else NEG_INF
        )
        if profit > best_profit:
            best_profit = profit
            best_cell = cell
            best_item = item
    if best_cell is None or best_profit <= TOLERANCE:
        return None

    members = frozenset({best_cell})
    item_idx = engine.item_index[best_item]
    usage = int(round(engine.rho[best_cell, item_idx]))

    while len(members) < n:
        frontier = _frontier(engine, members)
        if not frontier:
            break
        add_profit = NEG_INF
        add_cell = None
        for cell in frontier:
            grown = members | {cell}
            if not engine.feasible_content_exists(grown, fixed):
                profit = NEG_INF
            else:
                profit = float(engine.pop[cell, item_idx])
            if profit > add_profit:
                add_profit = profit
                add_cell = cell
        if add_cell is None or add_profit <= TOLERANCE:
            break
        members = members | {add_cell}
        usage = max(usage, int(round(engine.rho[add_cell, item_idx])))
    return members, best_item, usage


def _seed_holistic(
    engine: ScoreEngine,
    sequence: list[Membership],
    next_id: int,
    n: int,
    interest: str,
) -> tuple[frozenset[int], None, int] | None:
    base = engine.assign_total(sequence, interest)

    best_profit = 0.0
    best_cell = None
    for cell in range(n):
        members = frozenset({cell})
        if not engine.feasible_content_exists(members):
            continue
        profit = engine.assign_total(sequence + [(next_id, members)], interest) - base
        if profit > best_profit:
            best_profit = profit
            best_cell = cell
    if best_cell is None or best_profit <= TOLERANCE:
        return None

    members = frozenset({best_cell})
    while len(members) < n:
        frontier = _frontier(engine, members)
        if not frontier:
            break
        current = engine.assign_total(sequence + [(next_id, members)], interest)
        add_profit = NEG_INF
        add_cell = None
        for cell in frontier:
            grown = members | {cell}
            if not engine.feasible_content_exists(grown):
                continue
            profit = (
                engine.assign_total(sequence + [(next_id, grown)], interest) - current
            )
            if profit > add_profit:
                add_profit = profit
                add_cell = cell
        if add_cell is None or add_profit <= TOLERANCE:
            break
        members = members | {add_cell}
    return members, None, 0


def _frontier(engine: ScoreEngine, members: frozenset[int]) -> list[int]:
    info = engine.area_info(members)
    cells = [int(c) for c in (info.zone_any & ~info.member_mask).nonzero()[0]]
    return cells

"""Exact reference optimizer for desk-scale instances.

Enumerates every way to place at most the allowed number of connected,
possibly overlapping areas, every content choice, and (optionally) a small
grid of usage values above the tight minimum, then returns the feasible
plan with the best score. Exists to validate the heuristics and the
tight-usage reduction; refuses instances beyond its size limits.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from math import comb

import numpy as np

from .engine import ScoreEngine
from .metric import ScoreMode
from .model import (
    Area,
    Budget,
    ContentCatalog,
    OracleSizeError,
    Plan,
    TOLERANCE,
    Topology,
)


@dataclass(frozen=True)
class OracleLimits:
    max_cells: int = 6
    max_content: int = 3
    max_areas: int = 3


def connected_subsets(topology: Topology) -> list[frozenset[int]]:
    """All non-empty connected member sets, smallest first (then by members).

    Connectivity is enforced while expanding, not filtered afterwards: sets
    are rooted at their smallest cell and extended only through cells with
    larger ids reachable from the current set. A candidate skipped at some
    branching point stays excluded below it, so each set appears once.
    """
    n = topology.num_cells
    found: list[frozenset[int]] = []

    def extend(current: set[int], candidates: list[int], forbidden: frozenset[int], root: int) -> None:
        found.append(frozenset(current))
        for i, cell in enumerate(candidates):
            blocked = forbidden | frozenset(candidates[:i])
            current.add(cell)
            grown = list(candidates[i + 1 :])
            for c in sorted(topology.adjacent(cell)):
                if c > root and c not in current and c not in blocked and c not in grown:
                    grown.append(c)
            extend(current, grown, blocked, root)
            current.remove(cell)

    for root in range(n):
        start = sorted(c for c in topology.adjacent(root) if c > root)
        extend({root}, start, frozenset(), root)
    return sorted(found, key=lambda s: (len(s), tuple(sorted(s))))


def _enumeration_size(num_sets: int, max_areas: int, choices_per_area: int) -> int:
    total = 0
    for k in range(max_areas + 1):
        total += comb(num_sets + k - 1, k) * (choices_per_area**k)
    return total


def exhaustive_optimum(
    topology: Topology,
    catalog: ContentCatalog,
    budget: Budget,
    limits: OracleLimits | None = None,
    mode: ScoreMode = ScoreMode.NORMALIZED,
    x_offsets: tuple[int, ...] = (0,),
) -> tuple[Plan, float]:
    """Best feasible plan over every membership, content, and usage choice.

    Area labels are canonicalized (memberships are multisets of connected
    member sets), so label permutations are not enumerated twice. Usage is
    tight by default; pass ``x_offsets`` to also try values above tight.
    Ties resolve to the first candidate in canonical enumeration order:
    fewer areas first, then smaller member sets, then content, then
    offsets, so a tie never buys a larger footprint than needed.
    """
    limits = limits or OracleLimits()
    n = topology.num_cells
    m = len(catalog.items)
    cap_areas = budget.max_areas
    if n > limits.max_cells or m > limits.max_content or cap_areas > limits.max_areas:
        estimate = _enumeration_size(
            2**n - 1, cap_areas, max(1, m * len(x_offsets))
        )
        raise OracleSizeError(
            f"instance too large for exhaustive search "
            f"({n} cells, {m} items, cap {cap_areas}); "
            f"roughly {estimate} candidate plans",
            estimate,
        )

    engine = ScoreEngine(topology, catalog, budget, mode)
    sets = connected_subsets(topology)
    offsets = np.array(x_offsets, dtype=float)

    best_score = _empty_plan_score(engine)
    best_plan = Plan(areas=())

    for k in range(1, cap_areas + 1):
        item_combos = np.array(
            list(itertools.product(range(m), repeat=k)), dtype=int
        ).T.reshape(k, -1)
        off_combos = np.array(
            list(itertools.product(range(len(offsets)), repeat=k)), dtype=int
        ).T.reshape(k, -1)
        n_off = off_combos.shape[1]
        n_item = item_combos.shape[1]
        item_choice = np.repeat(item_combos, n_off, axis=1)
        off_choice = np.tile(off_combos, (1, n_item))
        if item_choice.size == 0:
            continue

        for combo in itertools.combinations_with_replacement(range(len(sets)), k):
            memberships = [sets[i] for i in combo]
            score, idx = _best_choice(
                engine, memberships, item_choice, off_choice, offsets
            )
            if idx is not None and score > best_score + TOLERANCE:
                best_score = score
                areas = []
                for a, members in enumerate(memberships):
                    j = int(item_choice[a, idx])
                    usage = int(
                        round(
                            engine.area_info(members).tight_usage[j]
                            + offsets[int(off_choice[a, idx])]
                        )
                    )
                    areas.append(
                        Area(id=a, members=members, content=catalog.items[j], usage=usage)
                    )
                best_plan = Plan(areas=tuple(areas))
    return best_plan, best_score


def exhaustive_content(
    topology: Topology,
    plan: Plan,
    catalog: ContentCatalog,
    budget: Budget,
    mode: ScoreMode = ScoreMode.NORMALIZED,
) -> tuple[Plan, float]:
    """Best feasible content assignment for a fixed membership structure.

    Each area may also stay inactive, so the optimum always dominates the
    greedy assignment, which can leave areas without content. Usage is
    tight. Ties prefer earlier items, with inactive as the last resort.
    """
    k = plan.num_areas
    m = len(catalog.items)
    if k and m**k > 10**6:
        raise OracleSizeError(
            f"{m}^{k} content assignments exceed the search limit", m**k
        )
    engine = ScoreEngine(topology, catalog, budget, mode)
    if k == 0:
        return plan, _empty_plan_score(engine)

    ordered = sorted(plan.areas, key=lambda a: a.id)
    memberships = [a.members for a in ordered]
    # choice m means "inactive"
    item_choice = np.array(
        list(itertools.product(range(m + 1), repeat=k)), dtype=int
    ).T.reshape(k, -1)
    off_choice = np.zeros_like(item_choice)
    score, idx = _best_choice(
        engine, memberships, item_choice, off_choice, np.zeros(1), allow_none=True
    )
    if idx is None:
        raise OracleSizeError("no evaluable content assignment", 0)
    areas = []
    for a, area in enumerate(ordered):
        j = int(item_choice[a, idx])
        if j == m:
            areas.append(replace(area, content=None, usage=0))
        else:
            usage = int(round(engine.area_info(area.members).tight_usage[j]))
            areas.append(replace(area, content=catalog.items[j], usage=usage))
    return Plan(areas=tuple(areas), topology_ref=plan.topology_ref), score


def _empty_plan_score(engine: ScoreEngine) -> float:
    avail = np.full(engine.n, engine.total)
    return float(engine._unicast_term(avail, engine.base_need, engine.base_rem).sum())


def _best_choice(
    engine: ScoreEngine,
    memberships: list[frozenset[int]],
    item_choice: np.ndarray,
    off_choice: np.ndarray,
    offsets: np.ndarray,
    allow_none: bool = False,
) -> tuple[float, int | None]:
    """Score every content/usage combination at once; return the winner.

    ``item_choice`` holds item indices per (area, combo); the index equal to
    the item count marks an inactive area when ``allow_none`` is set.
    """
    k, n_combo = item_choice.shape
    n = engine.n
    m = len(engine.items)

    member_mx = np.zeros((n, k))
    zone_mx = np.zeros((n, k))
    tight = np.zeros((k, m + 1))
    valid = np.zeros((k, m + 1), dtype=bool)
    for a, members in enumerate(memberships):
        info = engine.area_info(members)
        member_mx[info.member_idx, a] = 1.0
        zone_mx[info.zone_any, a] = 1.0
        tight[a, :m] = info.tight_usage
        valid[a, :m] = info.valid_items
        valid[a, m] = allow_none

    usage = np.take_along_axis(tight, item_choice, axis=1)
    usage = usage + offsets[off_choice]
    usage[item_choice == m] = 0.0

    feasible = np.take_along_axis(valid, item_choice, axis=1).all(axis=0)
    zone_load = zone_mx @ usage
    feasible &= (zone_load <= engine.cap + TOLERANCE).all(axis=0)
    if not feasible.any():
        return float("-inf"), None

    served = np.zeros((n, n_combo))
    need = np.repeat(engine.base_need[:, None], n_combo, axis=1)
    rem = np.repeat(engine.base_rem[:, None], n_combo, axis=1)
    for j in range(m):
        covered = (member_mx @ (item_choice == j)) > 0
        served += engine.pop[:, j : j + 1] * covered
        need -= engine.pop_rho[:, j : j + 1] * covered
        rem -= engine.pop[:, j : j + 1] * covered

    avail = np.clip(engine.total - zone_load, 0.0, None)
    totals = (served + engine._unicast_term(avail, need, rem)).sum(axis=0)
    totals[~feasible] = -np.inf
    idx = int(np.argmax(totals))
    return float(totals[idx]), idx

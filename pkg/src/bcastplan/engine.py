"""Vectorized scoring and greedy content selection.

Internal numeric core shared by the content assigner, the area-forming
heuristics, and the exhaustive oracle. It mirrors the reference semantics
of :mod:`bcastplan.metric` exactly (the unit tests assert equality) but
works on numpy arrays so heuristic profit probes stay cheap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metric import ScoreMode
from .model import Budget, ContentCatalog, TOLERANCE, Topology

Membership = tuple[int, frozenset[int]]  # (area id, member cells)


@dataclass
class _AreaInfo:
    member_idx: np.ndarray  # sorted member cell indices
    member_mask: np.ndarray  # bool (n,)
    zone_any: np.ndarray  # bool (n,): closed neighborhood touches >= 1 member
    zone_strict: np.ndarray  # bool (n,): exactly one member in the neighborhood
    tight_usage: np.ndarray  # float (M,): max demand over members per item
    valid_items: np.ndarray  # bool (M,): demand defined for every member
    interest_sum: float  # total broadcast interest over members
    interest_top: float  # best single-item interest over members
    users: float  # population of the member cells


class ScoreEngine:
    """Array-backed scorer bound to one (topology, catalog, budget) triple."""

    def __init__(
        self,
        topology: Topology,
        catalog: ContentCatalog,
        budget: Budget,
        mode: ScoreMode = ScoreMode.NORMALIZED,
        strict: bool = False,
    ):
        self.topology = topology
        self.catalog = catalog
        self.budget = budget
        self.mode = mode
        self.strict = strict

        n = topology.num_cells
        items = catalog.items
        m = len(items)
        self.n = n
        self.items = items
        self.item_index = {item: i for i, item in enumerate(items)}

        self.pop = np.zeros((n, m))
        self.rho = np.zeros((n, m))
        self.valid = np.zeros((n, m), dtype=bool)
        for (cell, item), count in catalog.popularity.items():
            self.pop[cell, self.item_index[item]] = count
        for (cell, item), blocks in catalog.demand.items():
            j = self.item_index[item]
            self.rho[cell, j] = blocks
            self.valid[cell, j] = True
        self.pop_rho = self.pop * self.rho

        self.users = np.array(topology.users_per_cell, dtype=float)
        pop_u = np.array([catalog.unicast_pop(c) for c in range(n)], dtype=float)
        rho_u = np.array([catalog.unicast_blocks(c) for c in range(n)])
        self.base_need = self.pop_rho.sum(axis=1) + pop_u * rho_u
        self.base_rem = self.pop.sum(axis=1) + pop_u

        nbh = np.eye(n, dtype=bool)
        for a, b in topology.edges:
            nbh[a, b] = True
            nbh[b, a] = True
        self.nbh = nbh

        self.total = float(budget.total)
        self.cap = float(budget.broadcast_cap)
        self._area_cache: dict[frozenset[int], _AreaInfo] = {}

    # ------------------------------------------------------------------
    # per-area static data

    def area_info(self, members: frozenset[int]) -> _AreaInfo:
        info = self._area_cache.get(members)
        if info is None:
            idx = np.fromiter(sorted(members), dtype=int)
            mask = np.zeros(self.n, dtype=bool)
            mask[idx] = True
            counts = self.nbh[:, idx].sum(axis=1)
            rows = self.rho[idx]
            info = _AreaInfo(
                member_idx=idx,
                member_mask=mask,
                zone_any=counts >= 1,
                zone_strict=counts == 1,
                tight_usage=rows.max(axis=0),
                valid_items=self.valid[idx].all(axis=0),
                interest_sum=float(self.pop[idx].sum()),
                interest_top=float(self.pop[idx].sum(axis=0).max(initial=0.0)),
                users=float(self.users[idx].sum()),
            )
            self._area_cache[members] = info
        return info

    def zone(self, info: _AreaInfo) -> np.ndarray:
        return info.zone_strict if self.strict else info.zone_any

    # ------------------------------------------------------------------
    # scoring primitives

    def _unicast_term(self, avail, need, rem):
        positive = need > TOLERANCE
        safe_need = np.where(positive, need, 1.0)
        if self.mode is ScoreMode.LITERAL:
            return np.where(positive, avail / safe_need, 0.0)
        return np.where(positive, np.minimum(1.0, avail / safe_need) * rem, rem)

    def feasible_content_exists(
        self, members: frozenset[int], fixed_load: np.ndarray | None = None
    ) -> bool:
        """True when some item can be streamed to ``members`` within the cap,
        given the load already claimed by other areas."""
        info = self.area_info(members)
        ok = info.valid_items.copy()
        if not ok.any():
            return False
        x = info.tight_usage
        if fixed_load is None:
            return bool((ok & (x <= self.cap + TOLERANCE)).any())
        head = fixed_load[self.zone(info)]
        fits = (head[:, None] + x[None, :] <= self.cap + TOLERANCE).all(axis=0)
        return bool((ok & fits).any())

    def fixed_load(self, areas: list[tuple[frozenset[int], int]]) -> np.ndarray:
        """Interference load per cell from areas with settled usage."""
        load = np.zeros(self.n)
        for members, usage in areas:
            if usage:
                load[self.zone(self.area_info(members))] += usage
        return load

    # ------------------------------------------------------------------
    # greedy content selection

    def assign(
        self,
        memberships: list[Membership],
        interest: str = "sum",
    ) -> tuple[dict[int, tuple[str | None, int]], float]:
        """Greedy content choice over the given memberships.

        Areas are processed by decreasing broadcast interest (ties toward
        the lower area id). Each area receives the viable item that
        maximizes the plan-wide score, or stays inactive when no item fits
        the interference budget. Returns the per-area decision and the
        total score of the completed plan.
        """
        infos = [self.area_info(members) for _, members in memberships]
        if interest == "max":
            keys = [info.interest_top for info in infos]
        else:
            keys = [info.interest_sum for info in infos]
        order = sorted(
            range(len(memberships)),
            key=lambda i: (-keys[i], memberships[i][0]),
        )

        used = np.zeros(self.n)
        served = np.zeros(self.n)
        need = self.base_need.copy()
        rem = self.base_rem.copy()
        in_broadcast = np.zeros((self.n, len(self.items)), dtype=bool)

        decisions: dict[int, tuple[str | None, int]] = {}
        for i in order:
            area_id = memberships[i][0]
            info = infos[i]
            x = info.tight_usage
            zone = self.zone(info)
            head = used[zone]
            viable = info.valid_items & (
                (head[:, None] + x[None, :] <= self.cap + TOLERANCE).all(axis=0)
            )
            if not viable.any():
                decisions[area_id] = (None, 0)
                continue

            # Candidate scores only differ inside the zone, so the argmax of
            # the local sum equals the argmax of the plan-wide score.
            mem_in_zone = info.member_mask[zone]
            gain_new = mem_in_zone[:, None] & ~in_broadcast[zone]
            pop_z = self.pop[zone]
            served_c = served[zone][:, None] + np.where(gain_new, pop_z, 0.0)
            need_c = need[zone][:, None] - np.where(gain_new, self.pop_rho[zone], 0.0)
            rem_c = rem[zone][:, None] - np.where(gain_new, pop_z, 0.0)
            avail_c = np.clip(self.total - (head[:, None] + x[None, :]), 0.0, None)
            local = (served_c + self._unicast_term(avail_c, need_c, rem_c)).sum(axis=0)
            local[~viable] = -np.inf
            choice = int(np.argmax(local))

            usage = int(round(x[choice]))
            used[zone] += usage
            fresh = info.member_idx[~in_broadcast[info.member_idx, choice]]
            served[fresh] += self.pop[fresh, choice]
            need[fresh] -= self.pop_rho[fresh, choice]
            rem[fresh] -= self.pop[fresh, choice]
            in_broadcast[fresh, choice] = True
            decisions[area_id] = (self.items[choice], usage)

        avail = np.clip(self.total - used, 0.0, None)
        total = float(served.sum() + self._unicast_term(avail, need, rem).sum())
        return decisions, total

    def assign_total(self, memberships: list[Membership], interest: str = "sum") -> float:
        return self.assign(memberships, interest)[1]

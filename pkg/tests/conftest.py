"""Shared builders for small planning instances used across the suite."""

from __future__ import annotations

import random

from bcastplan.model import Area, Budget, ContentCatalog, Plan, Topology


def make_topology(n, edges=(), users=None):
    if users is None:
        users = [60] * n
    return Topology.build(n, edges, users)


def make_catalog(
    n,
    items,
    pop=None,
    demand=None,
    default_blocks=100,
    unicast_users=None,
    unicast_demand=None,
):
    """Catalog helper; ``demand=None`` gives every (cell, item) pair
    ``default_blocks``."""
    items = tuple(items)
    if demand is None:
        demand = {(c, item): default_blocks for c in range(n) for item in items}
    return ContentCatalog(
        items=items,
        popularity=pop or {},
        demand=demand,
        unicast_users=unicast_users or {},
        unicast_demand=unicast_demand or {},
    )


def make_plan(*areas, topology_ref=""):
    return Plan(areas=tuple(areas), topology_ref=topology_ref)


def area(aid, members, content=None, usage=0):
    return Area(id=aid, members=frozenset(members), content=content, usage=usage)


def random_instance(seed):
    """Connected random instance: at most 5 cells, 3 items, cap 3.

    Per-cell interest never exceeds the population, matching the reference
    generator, so normalized scores stay within [0, total users].
    """
    rng = random.Random(seed)
    n = rng.randint(2, 5)
    edges = set()
    for c in range(1, n):
        other = rng.randrange(c)
        edges.add((other, c))
    for _ in range(rng.randint(0, n)):
        a, b = rng.sample(range(n), 2)
        edges.add((min(a, b), max(a, b)))

    m = rng.randint(1, 3)
    items = tuple(f"item{i}" for i in range(m))
    users = []
    pop = {}
    unicast_users = {}
    unicast_demand = {}
    demand = {}
    for c in range(n):
        total_users = rng.randint(0, 80)
        users.append(total_users)
        remaining = total_users
        if rng.random() < 0.3 and remaining:
            k = rng.randint(0, remaining)
            if k:
                unicast_users[c] = k
                unicast_demand[c] = rng.choice([0.5, 1.0, 2.0, 4.0])
                remaining -= k
        for item in items:
            if remaining <= 0:
                break
            k = rng.randint(0, remaining)
            if k:
                pop[(c, item)] = k
                remaining -= k
        for item in items:
            if rng.random() < 0.9:
                demand[(c, item)] = rng.randrange(40, 200, 10)
    for key in pop:
        demand.setdefault(key, rng.randrange(40, 200, 10))

    topology = Topology.build(n, edges, users)
    catalog = ContentCatalog(
        items=items,
        popularity=pop,
        demand=demand,
        unicast_users=unicast_users,
        unicast_demand=unicast_demand,
    )
    total = rng.randrange(300, 801, 50)
    cap = rng.randrange(100, total + 1, 50)
    budget = Budget(total=total, broadcast_cap=cap, max_areas=rng.randint(1, 3))
    return topology, catalog, budget


def random_membership(topology, rng, max_areas):
    """Plan skeleton with 1..max_areas random connected areas, no content."""
    n = topology.num_cells
    areas = []
    for aid in range(rng.randint(1, max_areas)):
        members = {rng.randrange(n)}
        for _ in range(rng.randint(0, n - 1)):
            frontier = sorted(
                c
                for cell in members
                for c in topology.adjacent(cell)
                if c not in members
            )
            if not frontier:
                break
            members.add(rng.choice(frontier))
        areas.append(Area(id=aid, members=frozenset(members)))
    return Plan(areas=tuple(areas))

import math
import random

import pytest

from bcastplan.model import (
    Area,
    Plan,
    Topology,
    UnknownCellError,
    areas_adjacent,
    closed_neighborhood,
    covered_cells,
    members_connected,
    uncovered_cells,
)
from bcastplan.scenario_io import generate_reference

from conftest import area, make_plan, make_topology, random_instance, random_membership


def test_closed_neighborhood_isolated_cell():
    topo = make_topology(1)
    assert closed_neighborhood(topo, 0) == {0}


def test_closed_neighborhood_path():
    topo = make_topology(3, [(0, 1), (1, 2)])
    assert closed_neighborhood(topo, 1) == {0, 1, 2}
    assert closed_neighborhood(topo, 0) == {0, 1}


def test_closed_neighborhood_unknown_cell():
    topo = make_topology(2, [(0, 1)])
    with pytest.raises(UnknownCellError):
        closed_neighborhood(topo, 5)


def test_closed_neighborhood_size_matches_degree():
    rng = random.Random(7)
    for seed in range(20):
        topo, _, _ = random_instance(seed)
        cell = rng.randrange(topo.num_cells)
        assert len(closed_neighborhood(topo, cell)) == 1 + len(topo.adjacent(cell))


def test_reference_interior_cell_has_seven_neighbors():
    scenario = generate_reference(1)
    topo = scenario.topology
    interior = [c for c in topo.cells if len(topo.adjacent(c)) == 6]
    assert interior, "expected interior cells in the 19-site layout"
    for cell in interior:
        assert len(closed_neighborhood(topo, cell)) == 7


def test_reference_adjacency_matches_distance_oracle():
    # Independent check: adjacency must be exactly the pairs of cells at
    # the minimum center distance of the hex tiling.
    scenario = generate_reference(1)
    coords = scenario.coords
    n = len(coords)
    dmin = min(
        math.dist(coords[a], coords[b]) for a in range(n) for b in range(a + 1, n)
    )
    expected = {
        (a, b)
        for a in range(n)
        for b in range(a + 1, n)
        if math.dist(coords[a], coords[b]) <= 1.05 * dmin
    }
    assert expected == set(scenario.topology.edges)


def test_areas_adjacent_cases():
    topo = make_topology(4, [(0, 1), (1, 2), (2, 3)])
    a1 = area(0, {0})
    a2 = area(1, {1})
    a3 = area(2, {2})
    shared = area(3, {1, 2})
    assert areas_adjacent(topo, a1, a2)
    assert not areas_adjacent(topo, a1, a3)
    assert areas_adjacent(topo, a2, shared)  # overlap counts as adjacency


def test_areas_adjacent_is_symmetric():
    rng = random.Random(3)
    for seed in range(25):
        topo, _, budget = random_instance(seed)
        plan = random_membership(topo, rng, max_areas=3)
        for a1 in plan.areas:
            for a2 in plan.areas:
                assert areas_adjacent(topo, a1, a2) == areas_adjacent(topo, a2, a1)


def test_covered_and_uncovered():
    topo = make_topology(3, [(0, 1), (1, 2)])
    assert covered_cells(make_plan()) == frozenset()
    assert uncovered_cells(make_plan(), topo) == {0, 1, 2}
    full = make_plan(area(0, {0, 1, 2}))
    assert uncovered_cells(full, topo) == frozenset()


def test_topology_validation():
    with pytest.raises(ValueError):
        make_topology(2, [(0, 0)])  # self loop
    with pytest.raises(ValueError):
        make_topology(2, [(0, 5)])  # unknown endpoint
    with pytest.raises(ValueError):
        Topology(cells=(1, 2), edges=frozenset(), users_per_cell=(1, 1))
    with pytest.raises(ValueError):
        make_topology(2, [], users=[-1, 0])


def test_area_and_plan_validation():
    with pytest.raises(ValueError):
        Area(id=0, members=frozenset())
    with pytest.raises(ValueError):
        Plan(areas=(area(0, {0}), area(0, {1})))


def test_members_connected():
    topo = make_topology(4, [(0, 1), (2, 3)])
    assert members_connected(topo, frozenset({0, 1}))
    assert not members_connected(topo, frozenset({1, 2}))
    assert members_connected(topo, frozenset())

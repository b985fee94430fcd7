import itertools
import random
from math import comb

import pytest

from bcastplan.area_form import ProfitKind, grow_plan, merge_plan
from bcastplan.metric import total_score
from bcastplan.model import Budget, OracleSizeError, members_connected
from bcastplan.oracle import (
    OracleLimits,
    connected_subsets,
    exhaustive_content,
    exhaustive_optimum,
)

from conftest import area, make_catalog, make_plan, make_topology, random_instance, random_membership


def _budget(total=500, cap=300, max_areas=2):
    return Budget(total=total, broadcast_cap=cap, max_areas=max_areas)


def _brute_force_connected(topo):
    found = set()
    n = topo.num_cells
    for bits in range(1, 2**n):
        members = frozenset(c for c in range(n) if bits & (1 << c))
        if members_connected(topo, members):
            found.add(members)
    return found


def test_connected_subsets_match_brute_force():
    rng = random.Random(61)
    for seed in range(30):
        topo, _, _ = random_instance(seed)
        sets = connected_subsets(topo)
        assert len(sets) == len(set(sets)), "duplicates in enumeration"
        assert set(sets) == _brute_force_connected(topo)
        assert sets == sorted(sets, key=lambda s: (len(s), tuple(sorted(s))))


def test_membership_count_matches_formula():
    # Independently computed count for a 3-cell path: connected sets are
    # {0},{1},{2},{0,1},{1,2},{0,1,2} so S=6; memberships with at most two
    # areas are C(6,0? ...) = sum over k of multisets C(S+k-1, k).
    topo = make_topology(3, [(0, 1), (1, 2)])
    sets = connected_subsets(topo)
    assert len(sets) == 6
    for cap in (1, 2, 3):
        expected = sum(comb(len(sets) + k - 1, k) for k in range(cap + 1))
        actual = sum(
            1
            for k in range(cap + 1)
            for _ in itertools.combinations_with_replacement(range(len(sets)), k)
        )
        assert actual == expected


def test_single_cell_broadcast_beats_baseline():
    topo = make_topology(1)
    catalog = make_catalog(1, ["m1"], pop={(0, "m1"): 60}, default_blocks=120)
    plan, score = exhaustive_optimum(topo, catalog, _budget(max_areas=1))
    assert plan.num_areas == 1
    assert plan.areas[0].content == "m1"
    assert score == pytest.approx(60.0)


def test_single_cell_stays_unicast_when_broadcast_wastes():
    # One user on a cheap item: broadcasting burns 120 blocks to satisfy a
    # single user while unicast leftovers already satisfy everyone.
    topo = make_topology(1, users=[1])
    catalog = make_catalog(1, ["m1"], pop={(0, "m1"): 1}, default_blocks=120)
    plan, score = exhaustive_optimum(topo, catalog, _budget(max_areas=1))
    assert plan.num_areas == 0
    assert score == pytest.approx(1.0)  # 500 blocks cover the 120 needed


def test_two_cell_disjoint_interests_two_singletons():
    topo = make_topology(2, [(0, 1)])
    catalog = make_catalog(
        2, ["m1", "m2"], pop={(0, "m1"): 60, (1, "m2"): 60}, default_blocks=100
    )
    plan, _ = exhaustive_optimum(topo, catalog, Budget(500, 300, 2))
    assert plan.num_areas == 2
    contents = {tuple(sorted(a.members)): a.content for a in plan.areas}
    assert contents == {(0,): "m1", (1,): "m2"}


def test_oracle_score_matches_reference_metric():
    for seed in range(25):
        topo, catalog, budget = random_instance(seed)
        plan, score = exhaustive_optimum(topo, catalog, budget)
        reference = total_score(topo, plan, catalog, budget).total
        assert score == pytest.approx(reference, abs=1e-9)


def test_oracle_dominates_heuristics_quick():
    for seed in range(30):
        topo, catalog, budget = random_instance(seed)
        _, best = exhaustive_optimum(topo, catalog, budget)
        for kind in ProfitKind:
            for planner in (merge_plan, grow_plan):
                plan = planner(topo, catalog, budget, kind)
                score = total_score(topo, plan, catalog, budget).total
                assert score <= best + 1e-9


def test_tight_usage_equals_grid_search_quick():
    for seed in range(15):
        topo, catalog, budget = random_instance(seed)
        _, tight = exhaustive_optimum(topo, catalog, budget)
        _, grid = exhaustive_optimum(
            topo, catalog, budget, x_offsets=(0, 10, 20)
        )
        assert grid == pytest.approx(tight, abs=1e-9)


def test_exhaustive_content_single_area_picks_best_item():
    topo = make_topology(2, [(0, 1)])
    catalog = make_catalog(
        2,
        ["m1", "m2"],
        pop={(0, "m1"): 30, (1, "m1"): 30, (0, "m2"): 20},
        default_blocks=100,
    )
    skeleton = make_plan(area(0, {0, 1}))
    plan, _ = exhaustive_content(topo, skeleton, catalog, Budget(500, 300, 4))
    assert plan.areas[0].content == "m1"
    assert plan.areas[0].usage == 100


def test_exhaustive_content_allows_inactive_area():
    # Two stacked areas but budget for only one broadcast: the optimum
    # leaves one inactive rather than refusing the instance.
    topo = make_topology(1)
    catalog = make_catalog(1, ["m1"], pop={(0, "m1"): 60}, default_blocks=200)
    skeleton = make_plan(area(0, {0}), area(1, {0}))
    plan, _ = exhaustive_content(topo, skeleton, catalog, Budget(500, 300, 4))
    contents = sorted((a.content is None) for a in plan.areas)
    assert contents == [False, True]


def test_size_refusals():
    topo = make_topology(7, [(i, i + 1) for i in range(6)])
    catalog = make_catalog(7, ["m1"], default_blocks=100)
    with pytest.raises(OracleSizeError) as err:
        exhaustive_optimum(topo, catalog, _budget(max_areas=2))
    assert err.value.estimate > 0

    topo2 = make_topology(2, [(0, 1)])
    catalog4 = make_catalog(2, ["a", "b", "c", "d"], default_blocks=100)
    with pytest.raises(OracleSizeError):
        exhaustive_optimum(topo2, catalog4, _budget(max_areas=2))

    catalog1 = make_catalog(2, ["m1"], default_blocks=100)
    with pytest.raises(OracleSizeError):
        exhaustive_optimum(topo2, catalog1, _budget(max_areas=4))
    # custom limits lift the refusal
    plan, _ = exhaustive_optimum(
        topo2, catalog1, _budget(max_areas=4), limits=OracleLimits(max_areas=4)
    )

    big = make_plan(*[area(i, {0}) for i in range(30)])
    catalog3 = make_catalog(1, ["a", "b", "c"], default_blocks=100)
    topo1 = make_topology(1)
    with pytest.raises(OracleSizeError):
        exhaustive_content(topo1, big, catalog3, _budget(max_areas=30))


def test_oracle_beats_or_equals_any_random_membership_assignment():
    rng = random.Random(67)
    for seed in range(15):
        topo, catalog, budget = random_instance(seed)
        _, best = exhaustive_optimum(topo, catalog, budget)
        plan = random_membership(topo, rng, budget.max_areas)
        scored, value = exhaustive_content(topo, plan, catalog, budget)
        assert value <= best + 1e-9

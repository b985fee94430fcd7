import random

import pytest

from bcastplan.constraints import check_plan
from bcastplan.content_assign import assign_content
from bcastplan.engine import ScoreEngine
from bcastplan.metric import ScoreMode, total_score
from bcastplan.model import Budget, Plan
from bcastplan.oracle import exhaustive_content

from conftest import (
    area,
    make_catalog,
    make_plan,
    make_topology,
    random_instance,
    random_membership,
)


def _budget(total=500, cap=300, max_areas=256):
    return Budget(total=total, broadcast_cap=cap, max_areas=max_areas)


def test_single_area_gets_single_content():
    topo = make_topology(1)
    catalog = make_catalog(1, ["m1"], pop={(0, "m1"): 60}, default_blocks=120)
    plan = assign_content(topo, make_plan(area(0, {0})), catalog, _budget())
    assert plan.areas[0].content == "m1"
    assert plan.areas[0].usage == 120


def test_usage_is_tight_maximum_over_members():
    topo = make_topology(2, [(0, 1)])
    catalog = make_catalog(
        2,
        ["m1"],
        pop={(0, "m1"): 60, (1, "m1"): 60},
        demand={(0, "m1"): 120, (1, "m1"): 130},
    )
    plan = assign_content(topo, make_plan(area(0, {0, 1})), catalog, _budget())
    assert plan.areas[0].usage == 130


def test_second_overlapping_area_left_inactive():
    # Both areas would need 200 blocks; their zones overlap everywhere, so
    # after the higher-interest area takes 200 of the 300-block cap no item
    # fits the second area.
    topo = make_topology(3, [(0, 1), (1, 2)])
    catalog = make_catalog(
        3,
        ["m1"],
        pop={(0, "m1"): 60, (1, "m1"): 60, (2, "m1"): 10},
        default_blocks=200,
    )
    plan = make_plan(area(0, {0, 1}), area(1, {1, 2}))
    result = assign_content(topo, plan, catalog, _budget())
    first = next(a for a in result.areas if a.id == 0)
    second = next(a for a in result.areas if a.id == 1)
    assert first.content == "m1" and first.usage == 200
    assert second.content is None and second.usage == 0
    assert check_plan(topo, result, catalog, _budget()).ok


def test_matches_exhaustive_on_line_instance():
    topo = make_topology(4, [(0, 1), (1, 2), (2, 3)])
    catalog = make_catalog(
        4,
        ["m1", "m2"],
        pop={(0, "m1"): 50, (1, "m1"): 40, (2, "m2"): 45, (3, "m2"): 55},
        default_blocks=150,
    )
    budget = Budget(total=500, broadcast_cap=400, max_areas=4)
    skeleton = make_plan(area(0, {0, 1}), area(1, {2, 3}))
    greedy = assign_content(topo, skeleton, catalog, budget)
    best_plan, best_score = exhaustive_content(topo, skeleton, catalog, budget)
    greedy_score = total_score(topo, greedy, catalog, budget).total
    assert greedy_score == pytest.approx(best_score, abs=1e-9)
    assert {a.content for a in greedy.areas} == {"m1", "m2"}
    assert {a.content for a in best_plan.areas} == {"m1", "m2"}


def test_order_of_input_areas_is_irrelevant():
    rng = random.Random(41)
    for seed in range(25):
        topo, catalog, budget = random_instance(seed)
        plan = random_membership(topo, rng, budget.max_areas)
        shuffled = list(plan.areas)
        rng.shuffle(shuffled)
        a = assign_content(topo, plan, catalog, budget, validate=False)
        b = assign_content(topo, Plan(areas=tuple(shuffled)), catalog, budget, validate=False)
        assert a.areas == b.areas


def test_deterministic():
    for seed in range(10):
        topo, catalog, budget = random_instance(seed)
        rng = random.Random(seed)
        plan = random_membership(topo, rng, budget.max_areas)
        first = assign_content(topo, plan, catalog, budget, validate=False)
        second = assign_content(topo, plan, catalog, budget, validate=False)
        assert first.areas == second.areas


def test_first_processed_area_gets_its_solo_best_content():
    rng = random.Random(43)
    for seed in range(25):
        topo, catalog, budget = random_instance(seed)
        plan = random_membership(topo, rng, budget.max_areas)
        result = assign_content(topo, plan, catalog, budget, validate=False)
        engine = ScoreEngine(topo, catalog, budget)
        ranked = sorted(
            plan.areas,
            key=lambda a: (-engine.area_info(a.members).interest_sum, a.id),
        )
        first = ranked[0]
        solo = assign_content(
            topo, make_plan(area(first.id, first.members)), catalog, budget,
            validate=False,
        )
        chosen = next(a for a in result.areas if a.id == first.id)
        assert chosen.content == solo.areas[0].content


def test_engine_total_matches_reference_metric():
    rng = random.Random(47)
    for seed in range(80):
        topo, catalog, budget = random_instance(seed)
        plan = random_membership(topo, rng, budget.max_areas)
        for mode in ScoreMode:
            engine = ScoreEngine(topo, catalog, budget, mode)
            decisions, engine_total = engine.assign(
                [(a.id, a.members) for a in plan.areas]
            )
            assigned = assign_content(topo, plan, catalog, budget, mode, validate=False)
            reference = total_score(topo, assigned, catalog, budget, mode).total
            assert engine_total == pytest.approx(reference, abs=1e-9)
            for a in assigned.areas:
                assert decisions[a.id] == (a.content, a.usage)


def test_interest_ranking_flag_changes_processing_order():
    # Area 0 has more total interest, area 1 a stronger single item; with
    # room for only one broadcast the flag decides which area wins.
    topo = make_topology(2, [(0, 1)])
    catalog = make_catalog(
        2,
        ["m1", "m2"],
        pop={(0, "m1"): 30, (0, "m2"): 30, (1, "m1"): 45},
        default_blocks=200,
    )
    budget = Budget(total=400, broadcast_cap=200, max_areas=4)
    skeleton = make_plan(area(0, {0}), area(1, {1}))
    by_sum = assign_content(topo, skeleton, catalog, budget, interest="sum")
    by_max = assign_content(topo, skeleton, catalog, budget, interest="max")
    active_sum = [a.id for a in by_sum.areas if a.active]
    active_max = [a.id for a in by_max.areas if a.active]
    assert active_sum == [0]
    assert active_max == [1]


def test_validate_rejects_oversized_and_disconnected():
    topo = make_topology(3, [(0, 1)])
    catalog = make_catalog(3, ["m1"], default_blocks=10)
    disconnected = make_plan(area(0, {0, 2}))
    with pytest.raises(ValueError):
        assign_content(topo, disconnected, catalog, _budget())
    too_many = make_plan(area(0, {0}), area(1, {1}))
    with pytest.raises(ValueError):
        assign_content(topo, too_many, catalog, _budget(max_areas=1))

"""Deterministic scenario generation and scenario/plan file I/O.

The reference scenario is a 3GPP-style layout: 19 tri-sector sites on a
hexagonal grid, 57 cells, 60 users each. Cells are modeled as hexagons in a
tiling, three per site, so same-site cells touch each other and cross-site
adjacency follows the tile geometry. Each cell's users want exactly one of
three streaming items, picked by the nearest of three seed points (three
contiguous regions), except for a seeded 20% share that wants a cheaper
update item available everywhere.

Files are canonical JSON (sorted keys, two-space indent, trailing newline)
so identical inputs produce byte-identical files and diffs stay readable.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .model import Area, Budget, ContentCatalog, Plan, PlanningError, Topology

SCENARIO_FORMAT = "bcastplan.scenario"
PLAN_FORMAT = "bcastplan.plan"
SCHEMA_VERSION = 1

SERVICE_AREA_M2 = 12.34e6
NUM_SITES = 19
SECTORS_PER_SITE = 3

STREAMING_ITEMS = ("streaming1", "streaming2", "streaming3")
UPDATE_ITEM = "update"

_AXIAL_DIRECTIONS = ((1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1))

_DEFAULTS: dict[str, Any] = {
    "users_per_cell": 60,
    "update_prob": 0.2,
    "deterministic_split": False,
    "streaming_blocks": 120,
    "update_blocks": 80,
    "total_resources": 500,
    "broadcast_cap": 300,
    "max_areas": 256,
}


class ScenarioIOError(PlanningError):
    """Base class for scenario and plan file problems."""


class SchemaVersionError(ScenarioIOError):
    pass


class MalformedFileError(ScenarioIOError):
    pass


class DanglingIdError(ScenarioIOError):
    pass


@dataclass(frozen=True)
class Scenario:
    """A self-contained planning instance plus plotting coordinates."""

    seed: int
    topology: Topology
    catalog: ContentCatalog
    budget: Budget
    coords: tuple[tuple[float, float], ...]
    region_assignment: tuple[str, ...] = ()
    item_kinds: Mapping[str, str] = field(default_factory=dict)

    def fingerprint(self) -> str:
        """Short content hash used to bind plans to this scenario."""
        return hashlib.sha256(scenario_bytes(self)).hexdigest()[:12]


# ---------------------------------------------------------------------------
# reference generation


def _site_anchors() -> list[tuple[int, int]]:
    anchors = []
    for m in range(-2, 3):
        for n in range(-2, 3):
            if (abs(m) + abs(n) + abs(m + n)) // 2 <= 2:
                anchors.append((m, n))
    return sorted(anchors)


def _hex_to_xy(q: int, r: int, radius: float) -> tuple[float, float]:
    return (math.sqrt(3.0) * radius * (q + r / 2.0), 1.5 * radius * r)


def generate_reference(seed: int = 1, overrides: Mapping[str, Any] | None = None) -> Scenario:
    """Build the reference scenario for the given seed.

    ``overrides`` may adjust: users_per_cell, update_prob,
    deterministic_split, streaming_blocks, update_blocks, total_resources,
    broadcast_cap, max_areas. Generation is a pure function of
    (seed, overrides).
    """
    params = dict(_DEFAULTS)
    for key, value in (overrides or {}).items():
        if key not in params:
            raise ValueError(f"unknown override {key!r}")
        params[key] = value
    if not (0.0 <= params["update_prob"] <= 1.0):
        raise ValueError("update_prob must be within [0, 1]")
    if params["users_per_cell"] < 0:
        raise ValueError("users_per_cell must be non-negative")

    anchors = _site_anchors()
    assert len(anchors) == NUM_SITES
    hexes: list[tuple[int, int]] = []
    for m, n in anchors:
        base_q, base_r = 2 * m + n, -m + n
        hexes.extend(
            ((base_q, base_r), (base_q + 1, base_r), (base_q, base_r + 1))
        )
    num_cells = len(hexes)

    cell_radius = math.sqrt(SERVICE_AREA_M2 / (num_cells * 3.0 * math.sqrt(3.0) / 2.0))
    coords = tuple(_hex_to_xy(q, r, cell_radius) for q, r in hexes)

    index = {h: i for i, h in enumerate(hexes)}
    edges = set()
    for i, (q, r) in enumerate(hexes):
        for dq, dr in _AXIAL_DIRECTIONS:
            j = index.get((q + dq, r + dr))
            if j is not None and i < j:
                edges.add((i, j))

    users = params["users_per_cell"]
    topology = Topology.build(num_cells, edges, [users] * num_cells)

    rng = random.Random(seed)
    extent = max(math.hypot(x, y) for x, y in coords)
    theta = rng.random() * 2.0 * math.pi
    seeds = [
        (
            0.55 * extent * math.cos(theta + 2.0 * math.pi * k / 3.0),
            0.55 * extent * math.sin(theta + 2.0 * math.pi * k / 3.0),
        )
        for k in range(len(STREAMING_ITEMS))
    ]
    region = []
    for x, y in coords:
        best_k = 0
        best_d = math.hypot(x - seeds[0][0], y - seeds[0][1])
        for k in range(1, len(seeds)):
            d = math.hypot(x - seeds[k][0], y - seeds[k][1])
            if d < best_d:
                best_d = d
                best_k = k
        region.append(STREAMING_ITEMS[best_k])

    popularity: dict[tuple[int, str], int] = {}
    for cell in range(num_cells):
        if params["deterministic_split"]:
            update_users = round(users * params["update_prob"])
        else:
            update_users = sum(
                1 for _ in range(users) if rng.random() < params["update_prob"]
            )
        streaming_users = users - update_users
        if streaming_users > 0:
            popularity[(cell, region[cell])] = streaming_users
        if update_users > 0:
            popularity[(cell, UPDATE_ITEM)] = update_users

    items = STREAMING_ITEMS + (UPDATE_ITEM,)
    demand = {}
    for cell in range(num_cells):
        for item in STREAMING_ITEMS:
            demand[(cell, item)] = params["streaming_blocks"]
        demand[(cell, UPDATE_ITEM)] = params["update_blocks"]

    catalog = ContentCatalog(items=items, popularity=popularity, demand=demand)
    budget = Budget(
        total=params["total_resources"],
        broadcast_cap=params["broadcast_cap"],
        max_areas=params["max_areas"],
    )
    kinds = {item: "streaming" for item in STREAMING_ITEMS}
    kinds[UPDATE_ITEM] = "update"
    return Scenario(
        seed=seed,
        topology=topology,
        catalog=catalog,
        budget=budget,
        coords=coords,
        region_assignment=tuple(region),
        item_kinds=kinds,
    )


# ---------------------------------------------------------------------------
# serialization


def _scenario_dict(scenario: Scenario) -> dict[str, Any]:
    n = scenario.topology.num_cells
    items = scenario.catalog.items
    return {
        "format": SCENARIO_FORMAT,
        "version": SCHEMA_VERSION,
        "seed": scenario.seed,
        "budget": {
            "total": scenario.budget.total,
            "broadcast_cap": scenario.budget.broadcast_cap,
            "max_areas": scenario.budget.max_areas,
        },
        "topology": {
            "cells": [
                {
                    "id": c,
                    "users": scenario.topology.users_per_cell[c],
                    "x": scenario.coords[c][0],
                    "y": scenario.coords[c][1],
                }
                for c in range(n)
            ],
            "edges": sorted([a, b] for a, b in scenario.topology.edges),
        },
        "catalog": {
            "items": [
                {"id": item, "kind": scenario.item_kinds.get(item, "generic")}
                for item in items
            ],
            "popularity": [
                {
                    item: scenario.catalog.pop(c, item)
                    for item in items
                    if scenario.catalog.pop(c, item)
                }
                for c in range(n)
            ],
            "demand": [
                {
                    item: scenario.catalog.blocks(c, item)
                    for item in items
                    if scenario.catalog.blocks(c, item) is not None
                }
                for c in range(n)
            ],
            "unicast_users": [scenario.catalog.unicast_pop(c) for c in range(n)],
            "unicast_demand": [scenario.catalog.unicast_blocks(c) for c in range(n)],
        },
        "region_assignment": list(scenario.region_assignment),
    }


def _canonical_bytes(payload: dict[str, Any]) -> bytes:
    return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode("utf-8")


def scenario_bytes(scenario: Scenario) -> bytes:
    return _canonical_bytes(_scenario_dict(scenario))


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    Path(path).write_bytes(scenario_bytes(scenario))


def load_scenario(path: str | Path) -> Scenario:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedFileError(f"not a valid scenario file: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != SCENARIO_FORMAT:
        raise MalformedFileError("missing scenario format marker")
    if payload.get("version") != SCHEMA_VERSION:
        raise SchemaVersionError(
            f"unsupported scenario schema version {payload.get('version')!r}"
        )
    try:
        cells = payload["topology"]["cells"]
        n = len(cells)
        ids = [entry["id"] for entry in cells]
        if ids != list(range(n)):
            raise DanglingIdError("cell ids must be dense and ordered")
        users = [int(entry["users"]) for entry in cells]
        coords = tuple((float(entry["x"]), float(entry["y"])) for entry in cells)
        edges = []
        for a, b in payload["topology"]["edges"]:
            if not (0 <= a < n and 0 <= b < n):
                raise DanglingIdError(f"edge [{a}, {b}] references an unknown cell")
            edges.append((a, b))
        item_entries = payload["catalog"]["items"]
        items = tuple(entry["id"] for entry in item_entries)
        kinds = {entry["id"]: entry.get("kind", "generic") for entry in item_entries}
        popularity = {}
        for cell, row in enumerate(payload["catalog"]["popularity"]):
            for item, count in row.items():
                if item not in kinds:
                    raise DanglingIdError(f"popularity references unknown item {item!r}")
                popularity[(cell, item)] = int(count)
        demand = {}
        for cell, row in enumerate(payload["catalog"]["demand"]):
            for item, blocks in row.items():
                if item not in kinds:
                    raise DanglingIdError(f"demand references unknown item {item!r}")
                demand[(cell, item)] = int(blocks)
        unicast_users = {
            c: int(v)
            for c, v in enumerate(payload["catalog"]["unicast_users"])
            if v
        }
        unicast_demand = {
            c: float(v)
            for c, v in enumerate(payload["catalog"]["unicast_demand"])
            if v
        }
        region = payload.get("region_assignment", [])
        for item in region:
            if item not in kinds:
                raise DanglingIdError(f"region assignment names unknown item {item!r}")
        budget_raw = payload["budget"]
        scenario = Scenario(
            seed=int(payload["seed"]),
            topology=Topology.build(n, edges, users),
            catalog=ContentCatalog(
                items=items,
                popularity=popularity,
                demand=demand,
                unicast_users=unicast_users,
                unicast_demand=unicast_demand,
            ),
            budget=Budget(
                total=int(budget_raw["total"]),
                broadcast_cap=int(budget_raw["broadcast_cap"]),
                max_areas=int(budget_raw["max_areas"]),
            ),
            coords=coords,
            region_assignment=tuple(region),
            item_kinds=kinds,
        )
    except ScenarioIOError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedFileError(f"scenario file is inconsistent: {exc}") from exc
    return scenario


# ---------------------------------------------------------------------------
# plan files


def plan_bytes(plan: Plan, meta: Mapping[str, Any] | None = None) -> bytes:
    meta = dict(meta or {})
    payload = {
        "format": PLAN_FORMAT,
        "version": SCHEMA_VERSION,
        "topology_ref": plan.topology_ref,
        "method": meta.get("method", ""),
        "profit": meta.get("profit", ""),
        "max_areas": meta.get("max_areas"),
        "mode": meta.get("mode", ""),
        "areas": [
            {
                "id": area.id,
                "members": sorted(area.members),
                "content": area.content,
                "usage": area.usage,
            }
            for area in sorted(plan.areas, key=lambda a: a.id)
        ],
    }
    return _canonical_bytes(payload)


def save_plan(plan: Plan, path: str | Path, meta: Mapping[str, Any] | None = None) -> None:
    Path(path).write_bytes(plan_bytes(plan, meta))


def load_plan(
    path: str | Path, scenario: Scenario | None = None
) -> tuple[Plan, dict[str, Any]]:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedFileError(f"not a valid plan file: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != PLAN_FORMAT:
        raise MalformedFileError("missing plan format marker")
    if payload.get("version") != SCHEMA_VERSION:
        raise SchemaVersionError(
            f"unsupported plan schema version {payload.get('version')!r}"
        )
    try:
        areas = []
        for entry in payload["areas"]:
            members = frozenset(int(c) for c in entry["members"])
            areas.append(
                Area(
                    id=int(entry["id"]),
                    members=members,
                    content=entry.get("content"),
                    usage=int(entry.get("usage", 0)),
                )
            )
        plan = Plan(areas=tuple(areas), topology_ref=payload.get("topology_ref", ""))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedFileError(f"plan file is inconsistent: {exc}") from exc

    meta = {
        "method": payload.get("method", ""),
        "profit": payload.get("profit", ""),
        "max_areas": payload.get("max_areas"),
        "mode": payload.get("mode", ""),
    }
    if scenario is not None:
        n = scenario.topology.num_cells
        known = set(scenario.catalog.items)
        for area in plan.areas:
            for cell in area.members:
                if not (0 <= cell < n):
                    raise DanglingIdError(f"area {area.id} references unknown cell {cell}")
            if area.content is not None and area.content not in known:
                raise DanglingIdError(
                    f"area {area.id} references unknown content {area.content!r}"
                )
        ref = scenario.fingerprint()
        if plan.topology_ref and plan.topology_ref != ref:
            raise DanglingIdError(
                "plan is bound to a different scenario "
                f"({plan.topology_ref} != {ref})"
            )
    return plan, meta

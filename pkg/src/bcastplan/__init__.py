"""Broadcast-area planning and content scheduling for LTE cell grids."""

from .area_form import (
    Action,
    ProfitKind,
    grow_plan,
    grow_plans_for_caps,
    merge_plan,
    merge_plans_for_caps,
    pr_add_demand,
    pr_create_demand,
    pr_holistic,
    pr_merge_demand,
)
from .constraints import (
    FeasibilityReport,
    Violation,
    check_cell_budget,
    check_neighbor_budget,
    check_plan,
    check_stream_min,
)
from .content_assign import assign_content
from .metric import ScoreMode, ScoreReport, cell_score, total_score
from .model import (
    Area,
    Budget,
    ContentCatalog,
    MergeInfeasibleError,
    MissingContentError,
    OracleSizeError,
    Plan,
    PlanningError,
    Topology,
    UnknownCellError,
    areas_adjacent,
    closed_neighborhood,
    covered_cells,
    empty_plan,
    uncovered_cells,
)
from .oracle import OracleLimits, exhaustive_content, exhaustive_optimum
from .scenario_io import (
    DanglingIdError,
    MalformedFileError,
    Scenario,
    SchemaVersionError,
    generate_reference,
    load_plan,
    load_scenario,
    save_plan,
    save_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "Action",
    "Area",
    "Budget",
    "ContentCatalog",
    "DanglingIdError",
    "FeasibilityReport",
    "MalformedFileError",
    "MergeInfeasibleError",
    "MissingContentError",
    "OracleLimits",
    "OracleSizeError",
    "Plan",
    "PlanningError",
    "ProfitKind",
    "Scenario",
    "SchemaVersionError",
    "ScoreMode",
    "ScoreReport",
    "Topology",
    "UnknownCellError",
    "Violation",
    "areas_adjacent",
    "assign_content",
    "cell_score",
    "check_cell_budget",
    "check_neighbor_budget",
    "check_plan",
    "check_stream_min",
    "closed_neighborhood",
    "covered_cells",
    "empty_plan",
    "exhaustive_content",
    "exhaustive_optimum",
    "generate_reference",
    "grow_plan",
    "grow_plans_for_caps",
    "load_plan",
    "load_scenario",
    "merge_plan",
    "merge_plans_for_caps",
    "pr_add_demand",
    "pr_create_demand",
    "pr_holistic",
    "pr_merge_demand",
    "save_plan",
    "save_scenario",
    "total_score",
    "uncovered_cells",
]

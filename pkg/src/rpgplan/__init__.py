"""Randomized possibility-graph footstep planning for flat ground with 3D
obstacles, with executable failure-probability bounds and a deterministic
Monte Carlo harness."""

from .biped import (
    LEFT,
    RIGHT,
    BipedSpec,
    DoubleSupport,
    FootPose,
    SingleSupport,
    foot_valid,
    is_reachable,
    necessary_check,
    reachable_region,
    transition_feasible,
    validate_mode_path,
)
from .bounds import (
    BoundInputs,
    DomainError,
    area_f_upper_bound,
    beta_m,
    combined_bound,
    combined_exponential_form,
    epsilon_for,
    estimate_vol_cn,
    exploration_failure_bound,
    mode_convergence_bound,
    mode_failure_bound,
)
from .geometry import PlanarRegion, SE2Cylinder, disk, largest_inscribed_cylinder, rectangle
from .planner import (
    BUDGET_EXHAUSTED,
    SOLVED,
    ExplorationGraph,
    ModeGraph,
    PlanError,
    PlanParams,
    PlanResult,
    SampleRegion,
    build_mode_graph,
    explore,
    plan,
    sample_modes,
    search_modes,
)
from .space import ExploreBounds, ExplorePose, Route, distance, interpolate, segment_valid
from .world import (
    BUILDERS,
    Box3,
    Environment,
    Query,
    Scenario,
    ScenarioError,
    build_checkers,
    build_pass_under,
    build_stepping_stones,
    load_scenario,
    save_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "BUDGET_EXHAUSTED",
    "BUILDERS",
    "BipedSpec",
    "BoundInputs",
    "Box3",
    "DomainError",
    "DoubleSupport",
    "Environment",
    "ExplorationGraph",
    "ExploreBounds",
    "ExplorePose",
    "FootPose",
    "LEFT",
    "ModeGraph",
    "PlanError",
    "PlanParams",
    "PlanResult",
    "PlanarRegion",
    "Query",
    "RIGHT",
    "Route",
    "SE2Cylinder",
    "SOLVED",
    "SampleRegion",
    "Scenario",
    "ScenarioError",
    "SingleSupport",
    "area_f_upper_bound",
    "beta_m",
    "build_checkers",
    "build_mode_graph",
    "build_pass_under",
    "build_stepping_stones",
    "combined_bound",
    "combined_exponential_form",
    "disk",
    "distance",
    "epsilon_for",
    "estimate_vol_cn",
    "explore",
    "exploration_failure_bound",
    "foot_valid",
    "interpolate",
    "is_reachable",
    "largest_inscribed_cylinder",
    "load_scenario",
    "mode_convergence_bound",
    "mode_failure_bound",
    "necessary_check",
    "plan",
    "rectangle",
    "reachable_region",
    "sample_modes",
    "save_scenario",
    "search_modes",
    "segment_valid",
    "transition_feasible",
    "validate_mode_path",
]

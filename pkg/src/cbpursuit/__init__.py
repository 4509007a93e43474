"""Constant-bearing pursuit on cycle-with-branches graphs.

Simulation of unit-speed planar agents under the constant-bearing pursuit
law, shape-space reductions (manifold shape and pure shape), equilibrium
catalogs and admissibility tests, branch stability analysis for the
three-agent mutual-pursuit-plus-branch topology, and behavior
classification of trajectories.
"""

from .behavior import classify_behavior, predict_behavior, shape_equilibrium_modes
from .control import (
    ManifoldShapeState,
    cb_control_law,
    cb_cost,
    closed_loop_full_derivative,
    manifold_shape_derivative,
)
from .equilibria import (
    EquilibriumReport,
    StabilityVerdict,
    branch_jacobian,
    circling_equilibrium,
    classify_stability_3agent,
    pure_shape_equilibria,
    rectilinear_equilibrium,
)
from .errors import (
    CBPursuitError,
    CollisionError,
    ConfigParseError,
    DisconnectedError,
    GraphError,
    InadmissibleEquilibriumError,
    InvalidConfigError,
    MultiTierBranchError,
    NonMonotonicTimeError,
    NotPeriodicError,
    SelfLoopError,
)
from .integrate import IntegratorConfig, Termination, Trajectory, integrate, rk4_step
from .model import (
    RHO_MIN,
    AgentState,
    CBParams,
    PursuitGraph,
    SystemState,
    rotation,
    validate_graph,
    wrap_angle,
)
from .pureshape import (
    PeriodEstimate,
    PureShapeState,
    conserved_quantity,
    detect_period,
    find_periodic_orbit,
    from_pure_shape,
    pure_shape_derivative,
    rescaled_time,
    special_case_derivative,
    to_pure_shape,
)
from .shape import (
    ArcShape,
    ShapeState,
    closure_residual,
    headings_on_manifold,
    shape_derivatives,
    shape_from_absolute,
    shape_series,
    state_from_manifold_shape,
)
from .systems import (
    BranchPhaseSystem,
    FullStateSystem,
    ManifoldShapeSystem,
    PureShapeSystem,
    SpecialCaseSystem,
    fd_jacobian,
)
from .presets import get_preset, preset_names
from .scenario import (
    Scenario,
    graph_params_from_config,
    load_scenario,
    scenario_from_config,
)

__version__ = "0.1.0"

__all__ = [
    "AgentState",
    "ArcShape",
    "BranchPhaseSystem",
    "CBParams",
    "CBPursuitError",
    "CollisionError",
    "ConfigParseError",
    "DisconnectedError",
    "EquilibriumReport",
    "FullStateSystem",
    "GraphError",
    "InadmissibleEquilibriumError",
    "IntegratorConfig",
    "InvalidConfigError",
    "ManifoldShapeState",
    "ManifoldShapeSystem",
    "MultiTierBranchError",
    "NonMonotonicTimeError",
    "NotPeriodicError",
    "PeriodEstimate",
    "PureShapeState",
    "PureShapeSystem",
    "PursuitGraph",
    "RHO_MIN",
    "Scenario",
    "SelfLoopError",
    "ShapeState",
    "SpecialCaseSystem",
    "StabilityVerdict",
    "SystemState",
    "Termination",
    "Trajectory",
    "branch_jacobian",
    "cb_control_law",
    "cb_cost",
    "circling_equilibrium",
    "classify_behavior",
    "classify_stability_3agent",
    "closed_loop_full_derivative",
    "closure_residual",
    "conserved_quantity",
    "detect_period",
    "fd_jacobian",
    "find_periodic_orbit",
    "from_pure_shape",
    "get_preset",
    "graph_params_from_config",
    "headings_on_manifold",
    "integrate",
    "load_scenario",
    "manifold_shape_derivative",
    "predict_behavior",
    "preset_names",
    "pure_shape_derivative",
    "pure_shape_equilibria",
    "rectilinear_equilibrium",
    "rescaled_time",
    "rk4_step",
    "rotation",
    "scenario_from_config",
    "shape_derivatives",
    "shape_equilibrium_modes",
    "shape_from_absolute",
    "shape_series",
    "special_case_derivative",
    "state_from_manifold_shape",
    "to_pure_shape",
    "validate_graph",
    "wrap_angle",
]

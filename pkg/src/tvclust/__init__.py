"""Synthesis of contiguously clustered linear arrays by gradient-sparsity optimization."""

from .array_model import (
    ArrayGeometry,
    DirectionGrid,
    ElementPatternSet,
    RadiationOperator,
    build_radiation_operator,
    discrete_gradient,
    evaluate_pattern,
    gradient_adjoint,
    uniform_geometry,
    uniform_theta_grid,
    uniform_u_grid,
)
from .clustering import (
    ClusteredLayout,
    clustered_excitations,
    clustering_factor,
    extract_clusters,
)
from .metrics import (
    MetricsReport,
    dynamic_range_ratio,
    full_report,
    pattern_matching_index,
    peak_directivity,
    sidelobe_level,
)
from .reference import (
    ReferencePattern,
    dolph_excitations,
    flattop_reference,
    load_reference,
    reference_from_excitations,
    save_reference,
    taylor_excitations,
)
from .segmentation import PartitionResult, dp_optimal_partition, oracle_front
from .solver import (
    SolveResult,
    SolverConfig,
    SolverDivergenceError,
    SolverState,
    al_gradient,
    al_objective,
    armijo_accept,
    bb_step,
    check_convergence,
    shrink,
    solve,
    update_multipliers,
)
from .sweep import ParetoPoint, SweepError, SweepPlan, pareto_filter, run_sweep

__version__ = "0.1.0"

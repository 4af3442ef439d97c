"""Non-negative rank-1 robust PCA: solvers, landscape certificates and experiments."""

from .certificates import (
    CertificateReport,
    check_det_asymmetric,
    check_det_symmetric,
    check_prob_asymmetric,
    check_prob_symmetric,
    connectivity_threshold,
    degree_concentration_bounds,
    observation_margin,
    stationary_box_check,
)
from .generators import (
    NoiseModel,
    build_bipartite_counterexample,
    build_zero_entry_counterexample,
    gen_truth,
    sample_noise,
    sample_omega,
)
from .graph import GraphReport, SparsityGraph, analyze, graph_from, good_bad_subgraphs
from .model import (
    ComponentVector,
    Instance,
    MeasurementSet,
    SparseNoise,
    SymmetrizedInstance,
    build_asymmetric_instance,
    build_rank_r_instance,
    build_symmetric_instance,
    condition_number,
    recovery_error,
    symmetrize,
)
from .objective import (
    ObjectiveSpec,
    d_stationarity_test,
    descent_direction,
    directional_derivative,
    eval_objective,
    objective_spec,
    subgradient,
)
from .solver import SolverConfig, SolverResult, solve_asymmetric, solve_rank_r, solve_symmetric

__version__ = "0.1.0"

__all__ = [
    "CertificateReport",
    "ComponentVector",
    "GraphReport",
    "Instance",
    "MeasurementSet",
    "NoiseModel",
    "ObjectiveSpec",
    "SolverConfig",
    "SolverResult",
    "SparseNoise",
    "SparsityGraph",
    "SymmetrizedInstance",
    "analyze",
    "build_asymmetric_instance",
    "build_bipartite_counterexample",
    "build_rank_r_instance",
    "build_symmetric_instance",
    "build_zero_entry_counterexample",
    "check_det_asymmetric",
    "check_det_symmetric",
    "check_prob_asymmetric",
    "check_prob_symmetric",
    "condition_number",
    "connectivity_threshold",
    "d_stationarity_test",
    "degree_concentration_bounds",
    "descent_direction",
    "directional_derivative",
    "eval_objective",
    "gen_truth",
    "good_bad_subgraphs",
    "graph_from",
    "objective_spec",
    "observation_margin",
    "recovery_error",
    "sample_noise",
    "sample_omega",
    "solve_asymmetric",
    "solve_rank_r",
    "solve_symmetric",
    "stationary_box_check",
    "subgradient",
    "symmetrize",
]

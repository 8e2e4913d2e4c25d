"""Projection-free constrained convex optimization over linear oracles.

Boosted Frank-Wolfe plus classic baselines (Frank-Wolfe, away-step,
decomposition-invariant pairwise, and its boosted variant) sharing one
trace schema, with pluggable feasible regions (scaled simplex, l1 ball,
nuclear-norm ball, DAG path polytopes) and a benchmark CLI.
"""

from .core import (ConvergenceError, CriticalPointError, DimensionError,
                   InfeasibleError, Objective, OptError, SmoothnessEstimate,
                   as_vector, check_gradient, estimate_smoothness, inner, norm)
from .objectives import (BeckmannInstance, GenericQuadraticInstance,
                         HuberCompletionInstance, LeastSquaresInstance,
                         LiftedObjective, LogisticInstance, SquaredDistance,
                         completion, eval_and_grad, flow_quadratic,
                         generate_instance, lift_objective,
                         load_labeled_csv, load_triplets_csv, logistic_sparse,
                         sparse_recovery, traffic)
from .pursuit import (PursuitConfig, PursuitOutcome, PursuitRound, ThetaRow,
                      align, gradient_pursuit, theta_from_alignments,
                      theta_statistics)
from .regions import (ActiveSet, DagFlowRegion, DagNetwork, ExplicitPolytope,
                      L1Ball, NuclearBall, ScaledSimplex, Vertex, away_vertex,
                      dicg_away_vertex, lift_l1, lmo_dag_flow, lmo_l1_ball,
                      lmo_nuclear_ball, lmo_scaled_simplex, project_l1)
from .solvers import (RunTrace, SolverConfig, StepRule, TraceRow, duality_gap,
                      run, run_afw, run_boostdicg, run_boostfw, run_dicg,
                      run_fw, step_size)

__version__ = "1.0.0"

__all__ = [
    "ActiveSet", "BeckmannInstance", "ConvergenceError", "CriticalPointError",
    "DagFlowRegion", "DagNetwork", "DimensionError", "ExplicitPolytope",
    "GenericQuadraticInstance", "HuberCompletionInstance", "InfeasibleError",
    "L1Ball", "LeastSquaresInstance", "LiftedObjective", "LogisticInstance",
    "NuclearBall", "Objective", "OptError", "PursuitConfig", "PursuitOutcome",
    "PursuitRound", "RunTrace", "ScaledSimplex", "SmoothnessEstimate",
    "SolverConfig", "SquaredDistance", "StepRule", "ThetaRow", "TraceRow",
    "Vertex", "align", "as_vector", "away_vertex", "check_gradient",
    "completion", "dicg_away_vertex", "duality_gap", "estimate_smoothness",
    "eval_and_grad", "flow_quadratic", "generate_instance", "gradient_pursuit",
    "inner", "lift_l1", "lift_objective", "lmo_dag_flow", "lmo_l1_ball",
    "lmo_nuclear_ball", "lmo_scaled_simplex", "load_labeled_csv",
    "load_triplets_csv", "logistic_sparse", "norm", "project_l1", "run",
    "run_afw", "run_boostdicg", "run_boostfw", "run_dicg", "run_fw",
    "sparse_recovery", "step_size", "theta_from_alignments",
    "theta_statistics", "traffic",
]

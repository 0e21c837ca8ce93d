"""Primal-dual forward-backward-forward splitting for systems of coupled
monotone inclusions and their convex-minimization specializations."""

from .blocks import (
    BlockLinearOp,
    BlockVector,
    SignatureError,
    SpaceSig,
    apply_adjoint,
    apply_block,
    lambda_conservative,
    lambda_power_iteration,
)
from .fbf import (
    DivergenceError,
    FbfConfig,
    FbfTrace,
    SummableErrorSchedule,
    fbf_solve,
)
from .operators import (
    AffineMap,
    AffineOperator,
    Ball,
    Box,
    ConvexFunction,
    ConvexSet,
    Halfspace,
    Hyperplane,
    IndicatorFunction,
    L1Norm,
    LipschitzOperator,
    MonotoneOperator,
    NormalCone,
    ParameterError,
    Point,
    QuadraticDistance,
    ScaledIdentity,
    ScaledIdentityMap,
    SquaredNorm,
    SubdifferentialOperator,
    ZeroFunction,
    ZeroMap,
    ZeroOperator,
    conjugate_prox,
    graph_distance,
    prox,
    resolvent,
    shifted_inverse_resolvent,
    yosida,
)
from .reductions import (
    CommonZeroProblem,
    EvaluationError,
    FeasibilityRelaxation,
    MultivariateMinProblem,
    ParallelSumProblem,
    Smooth,
    UnivariateMinProblem,
    check_consistency_theorem,
    check_qualification,
    evaluate_objectives,
    lift_parallel_sum,
    relaxation_objective,
    solve_common_zero,
    solve_feasibility_relaxation,
    solve_multivariate_min,
    solve_parallel_sum,
    solve_univariate_min,
    zero_smooth,
)
from .system import (
    CoupledInclusionProblem,
    SolveReport,
    compute_beta,
    kkt_residual,
    product_space_pair,
    solve_system,
)

__version__ = "0.1.0"

"""Optimization landscape of linear-quadratic Gaussian output feedback.

The package studies the cost J(K) of dynamical output-feedback controllers
K = (A_K, B_K, C_K) over the set of closed-loop stabilizing controllers:
evaluation and derivatives of the cost, synthesis of the optimal controller,
certification of stationary points, the connectivity structure of the
stabilizing set (component signs, stabilizing paths), and gradient descent
with certified limits.  Continuous- and discrete-time plants are supported
throughout.
"""

from .connectivity import (
    ConvexLift,
    Sign,
    component_sign,
    lift,
    path_between,
    realize,
    reduced_order_search,
    transform_lift,
    verify_lift,
)
from .cost import (
    CostEval,
    GradientTriple,
    RestrictedSpectrum,
    hessian_bilinear,
    hessian_matrix,
    hessian_quadratic_form,
    lqg_cost,
    lqg_gradient,
    restricted_rcond,
)
from .errors import (
    AssumptionViolated,
    DegeneratePi,
    IllConditioned,
    InvariantViolated,
    LandscapeError,
    NoPathFound,
    NonDiagonalizable,
    NonMinimalController,
    NotControllable,
    NotSISO,
    NotStabilizable,
    NotStabilizing,
    NotStationary,
    NoStabilizingSolution,
    PlacementFailed,
    PlantNotStable,
    PoleHit,
    RetriesExhausted,
    SingularTransform,
    StabilityLostOnPath,
    UnstableCoefficient,
    UnstablePadding,
)
from .examples import (
    EXAMPLE_NAMES,
    CheckResult,
    NamedExample,
    get_example,
    list_examples,
)
from .linalg import (
    MinimalityReport,
    StabilityReport,
    TimeDomain,
    ctrb,
    minimality,
    obsv,
    solve_care,
    solve_lyapunov,
    stability,
)
from .model import (
    Controller,
    Direction,
    Plant,
    canonical_form,
    closed_loop,
    controller_from_dict,
    controller_to_dict,
    is_stabilizing,
    orbit_match,
    perturb,
    plant_from_dict,
    plant_to_dict,
    project_tangent,
    similarity,
    tangent_space,
    transfer_eval,
)
from .optimizer import (
    CertifiedLimit,
    LimitVerdict,
    OptimizerConfig,
    Parameterization,
    Terminal,
    Trace,
    TraceRecord,
    certify_limit,
    descend,
    init_near_optimal,
    init_pole_placement,
)
from .synthesis import (
    RecoveredCertificate,
    SaddleClass,
    StationaryReport,
    Verdict,
    ZeroControllerSaddle,
    analyze_stationary,
    augment_stationary,
    classify_zero_controller_saddle,
    riccati_controller,
    riccati_gains,
    zero_controller_transfer,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # linalg
    "TimeDomain", "StabilityReport", "MinimalityReport", "stability",
    "solve_lyapunov", "solve_care", "ctrb", "obsv", "minimality",
    # model
    "Plant", "Controller", "Direction", "closed_loop", "is_stabilizing",
    "perturb", "similarity", "transfer_eval", "canonical_form",
    "tangent_space", "project_tangent", "orbit_match", "plant_to_dict",
    "plant_from_dict", "controller_to_dict", "controller_from_dict",
    # cost
    "CostEval", "GradientTriple", "RestrictedSpectrum", "lqg_cost",
    "lqg_gradient", "hessian_quadratic_form", "hessian_bilinear",
    "hessian_matrix", "restricted_rcond",
    # synthesis
    "Verdict", "SaddleClass", "StationaryReport", "RecoveredCertificate",
    "ZeroControllerSaddle", "riccati_gains", "riccati_controller",
    "analyze_stationary", "augment_stationary", "zero_controller_transfer",
    "classify_zero_controller_saddle",
    # connectivity
    "Sign", "ConvexLift", "lift", "realize", "verify_lift", "transform_lift",
    "component_sign", "path_between", "reduced_order_search",
    # optimizer
    "Parameterization", "Terminal", "OptimizerConfig", "TraceRecord",
    "Trace", "descend", "init_pole_placement", "init_near_optimal",
    "LimitVerdict", "CertifiedLimit", "certify_limit",
    # examples
    "CheckResult", "NamedExample", "EXAMPLE_NAMES", "get_example",
    "list_examples",
    # errors
    "LandscapeError", "AssumptionViolated", "UnstableCoefficient",
    "IllConditioned", "NotStabilizable", "NoStabilizingSolution",
    "NotStabilizing", "SingularTransform", "PoleHit", "NotControllable",
    "NotSISO", "NonMinimalController", "NotStationary", "UnstablePadding",
    "PlantNotStable", "NonDiagonalizable", "InvariantViolated",
    "DegeneratePi", "NoPathFound", "StabilityLostOnPath", "PlacementFailed",
    "RetriesExhausted",
]

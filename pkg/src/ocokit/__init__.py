"""Adaptive online convex optimization learners with a verification harness.

Learners (gradient-sum, proximally recentered, composite L1, entropic,
strongly convex), mirror descent and its exact FTRL reformulation, regret
bounds evaluated per round, and brute-force oracles that certify every
closed-form update.
"""

from .bounds import (
    BoundRule,
    RegretRecord,
    RunTrace,
    best_comparator,
    bound_curve,
    bound_value,
    cumulative_regret,
    strong_ftrl_decomposition,
)
from .core import (
    AdaGradRate,
    CompositePenalty,
    ConsistencyError,
    ConstantRate,
    FeasibleSet,
    InverseLinearRate,
    InverseSqrtRate,
    InvariantViolation,
    LearningRateSchedule,
    RegularizerSpec,
    UnsupportedCombination,
    bregman_divergence,
    clamp_box,
    negative_entropy,
    project_l2_ball,
    project_simplex,
    schedule_sigma,
    soft_threshold_argmin,
    softmax_simplex,
)
from .driver import L1ExampleResult, RunResult, repro_l1_example, run_rounds
from .learners import (
    BoundConfig,
    DualAveraging,
    EntropicFtrl,
    FtrlCompositeL1,
    FtrlProximal,
    StronglyConvexOgd,
)
from .mirror import (
    GreedyProjection,
    LazyProjection,
    MdAsFtrl,
    MirrorDescent,
    extract_psi_subgradient,
)
from .streams import (
    L1AdversaryStream,
    LogisticStream,
    ParseError,
    RandomLinearStream,
    StreamEvent,
    StronglyConvexQuadraticStream,
    l1_adversary_next,
    logistic_example_gradient,
    logistic_loss,
    parse_svmlight,
    serialize_svmlight,
)

__version__ = "0.1.0"

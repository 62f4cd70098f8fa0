"""Attention incentives in single-agent screening mechanisms.

Discretized model of an agent who either perceives their type correctly
(at a cognitive cost) or through a perception-generating process, plus the
machinery to compute the value of attention, rank processes by accuracy,
and solve the provision, screening, and hype applications.
"""

from .accuracy import (
    AccuracyCurve,
    Ordering,
    accuracy_curve,
    agent_welfare,
    compare_accuracy,
)
from .attention import (
    AttentionWeights,
    MaximizerReport,
    attention_maximizers,
    attention_weights,
    value_of_attention,
    value_of_attention_direct,
)
from .efficiency import (
    EfficiencyReport,
    efficiency_report,
    manage_attention_floor,
    manage_the_process,
    sell_the_firm,
    welfare_bounds,
)
from .errors import (
    AttnMechError,
    GridMismatchError,
    InfeasibleConstraintError,
    InvalidGridError,
    InvalidPgpError,
    KernelError,
    ManageInfeasibleError,
    MonotonicityError,
    PriorMismatchError,
    ScenarioError,
    SizeLimitError,
)
from .hype_pricing import (
    HypeEquilibrium,
    buyer_optimal_hype,
    optimal_price,
    seller_optimal_hype,
)
from .model import (
    DEFAULT_GRID_N,
    AllocationRule,
    CostFunction,
    Grid,
    Mechanism,
    Pgp,
    TypeDist,
    allocation_rule,
    attentive_utility,
    builtin_pgp,
    conservatism,
    constant_rule,
    envelope_mechanism,
    fictitious_information,
    garble,
    hype,
    inattentive_utility,
    is_unbiased,
    make_grid,
    perfect_perception,
    pgp_from_kernel,
    point_prior,
    pool_kernel,
    prelec_weighting,
    probability_weighting,
    threshold_rule,
    type_dist,
    uniform_prior,
)
from .optimize import (
    ConstrainedSolution,
    SeparableObjective,
    brute_force_monotone,
    isotonic_fit,
    maximize_monotone,
    maximize_with_attention_constraint,
    monotone_quadratic_argmax,
)

__version__ = "0.1.0"

"""Revenue screening with endogenous attention (fixed quadratic scenario).

The scenario: uniform types, quality cost x^2/2, and an inattentive
perception distribution that is uniform on [1/4, 3/4]. Two processes
generate that distribution: an unbiased martingale coupling and a biased
shrinkage toward the mean. The unbiased coupling is not unique; two exact
grid constructions are provided (a deterministic fold and a mean-preserving
rebalance of it) and every result must be invariant to the choice.

Generic screening problems should go through ``revenue_objective`` and the
monotone optimizer instead; this module hard-codes the scenario.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .attention import AttentionWeights, attention_weights, value_of_attention
from .errors import InvalidGridError
from .model import (
    AllocationRule,
    CostFunction,
    Grid,
    Mechanism,
    Pgp,
    TypeDist,
    allocation_rule,
    attentive_utility,
    conservatism,
    envelope_mechanism,
    garble,
    make_grid,
    uniform_prior,
)
from .optimize import SeparableObjective

DEFAULT_N = 2000

RHO_U = "rho_U"
RHO_C = "rho_C"

REGIME_ATTENTIVE_FREE = "Attentive-Unconstrained"
REGIME_ATTENTIVE_CONSTRAINED = "Attentive-Constrained"
REGIME_INATTENTIVE = "Inattentive"


def _screening_grid(n: int) -> Grid:
    if n % 4 != 0:
        raise InvalidGridError(f"screening scenario needs n divisible by 4, got {n}")
    return make_grid(n)


def fold_kernel(grid: Grid) -> np.ndarray:
    """Deterministic unbiased coupling: low types fold up by 1/4, high down.

    Each perception in [1/4, 3/4] pools one type from below and one from
    above at equal odds, so the posterior mean equals the perception exactly
    on the grid.
    """
    n = grid.n
    shift = n // 4
    kernel = np.zeros((n, n))
    rows = np.arange(n)
    kernel[rows[: n // 2], rows[: n // 2] + shift] = 1.0
    kernel[rows[n // 2 :], rows[n // 2 :] - shift] = 1.0
    return kernel


def rebalanced_kernel(grid: Grid) -> np.ndarray:
    """Second unbiased coupling: the fold with mass shuffled three ways.

    Preserves row sums, the perception marginal, and every perception's
    posterior mean (the shuffled rows are equally spaced), so it solves the
    same coupling feasibility problem while differing from the fold.
    """
    n = grid.n
    shift = n // 4
    kernel = fold_kernel(grid)
    r2 = np.arange(shift, n // 2)
    r1, r3 = r2 - shift, r2 + shift
    kernel[r1, r2] -= 0.5
    kernel[r1, r2 + shift] += 0.5
    kernel[r2, r2 + shift] -= 1.0
    kernel[r2, r2] += 1.0
    kernel[r3, r2] -= 0.5
    kernel[r3, r3] += 0.5
    return kernel


def rho_u(n: int = DEFAULT_N, variant: str = "fold") -> Pgp:
    """Unbiased process with perceptions uniform on [1/4, 3/4]."""
    grid = _screening_grid(n)
    prior = uniform_prior(grid)
    if variant == "fold":
        return garble(fold_kernel(grid), prior)
    if variant == "rebalanced":
        return garble(rebalanced_kernel(grid), prior)
    raise ValueError(f"unknown rho_U variant {variant!r}")


def rho_c(n: int = DEFAULT_N) -> Pgp:
    """Biased process: the type is perceived as its mean-shrunk half."""
    grid = _screening_grid(n)
    return conservatism(0.5, uniform_prior(grid))


@functools.lru_cache(maxsize=8)
def screening_pgp(tag: str, n: int = DEFAULT_N, variant: str = "fold") -> Pgp:
    if tag == RHO_U:
        return rho_u(n, variant)
    if tag == RHO_C:
        return rho_c(n)
    raise ValueError(f"unknown screening pgp tag {tag!r}")


# ---------------------------------------------------------------------------
# Benchmark rules and profits
# ---------------------------------------------------------------------------


def attentive_benchmark_rule(grid: Grid) -> AllocationRule:
    """Quality menu for attentive buyers: max(0, 2*pi - 1)."""
    return allocation_rule(grid, np.clip(2.0 * grid.midpoints - 1.0, 0.0, 1.0))


def inattentive_benchmark_rule(grid: Grid) -> AllocationRule:
    """Quality menu for inattentive buyers: max(0, 2*x - 3/4), held flat
    at 3/4 above the perception support (one admissible completion)."""
    q = np.clip(2.0 * grid.midpoints - 0.75, 0.0, 0.75)
    return allocation_rule(grid, q)


def attentive_profit(rule: AllocationRule) -> float:
    """Expected transfers net of cost against uniform attentive reports."""
    m = rule.grid.midpoints
    q = rule.q
    return float(np.mean(q * (2.0 * m - 1.0) - 0.5 * q * q))


def inattentive_profit(mech: Mechanism, pgp: Pgp) -> float:
    """Expected transfers net of cost against perception-driven reports."""
    q = mech.rule.q
    return float(pgp.perceived_pmf @ (mech.transfers - 0.5 * q * q))


def revenue_objective(grid: Grid, dist: TypeDist, cost: CostFunction) -> SeparableObjective:
    """Separable objective equal to expected transfers net of cost.

    Uses the exact discrete virtual value implied by envelope transfers;
    zero-mass cells still depress revenue through the information rent of
    higher reports, which lands in the linear term.
    """
    width = grid.width
    tail = 1.0 - dist.cdf[1:]
    pos = dist.pmf > 0
    virtual = np.where(
        pos,
        grid.midpoints - 0.5 * width - tail * width / np.where(pos, dist.pmf, 1.0),
        0.0,
    )
    linear = np.where(pos, 0.0, -tail * width)
    return SeparableObjective(grid=grid, mass=dist.pmf, value=virtual, cost=cost, linear=linear)


def attentive_revenue_objective(grid: Grid) -> SeparableObjective:
    """Uniform-prior quadratic-cost revenue: virtual value 2m - 1 exactly."""
    return SeparableObjective(
        grid=grid,
        mass=np.full(grid.n, grid.width),
        value=2.0 * grid.midpoints - 1.0,
        cost=CostFunction.quadratic(),
    )


@dataclass(frozen=True, eq=False)
class ScreeningBenchmarks:
    q_attentive: AllocationRule
    q_inattentive: AllocationRule
    profit_attentive: float
    profit_inattentive: float


def screening_benchmarks(n: int = DEFAULT_N, variant: str = "fold") -> ScreeningBenchmarks:
    grid = _screening_grid(n)
    q_a = attentive_benchmark_rule(grid)
    q_i = inattentive_benchmark_rule(grid)
    pgp = rho_u(n, variant)
    return ScreeningBenchmarks(
        q_attentive=q_a,
        q_inattentive=q_i,
        profit_attentive=attentive_profit(q_a),
        profit_inattentive=inattentive_profit(envelope_mechanism(q_i), pgp),
    )


# ---------------------------------------------------------------------------
# Optimal screening for a given cognitive cost
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ScreeningThresholds:
    kappa_low: float  # attention value of the attentive benchmark
    kappa_high: float  # cost level where constrained profit meets the inattentive one
    slope: float  # d(nu)/d(multiplier) along the closed-form family


def screening_thresholds(pgp: Pgp, weights: AttentionWeights | None = None) -> ScreeningThresholds:
    grid = pgp.grid
    if weights is None:
        weights = attention_weights(pgp)
    q_a = attentive_benchmark_rule(grid)
    kappa_low = value_of_attention(q_a, weights)
    upper = grid.midpoints > 0.5
    slope = float(np.sum(weights.w[upper] ** 2) * grid.n)
    profit_a = attentive_profit(q_a)
    profit_i = inattentive_profit(envelope_mechanism(inattentive_benchmark_rule(grid)), pgp)
    lam_bar = float(np.sqrt(2.0 * (profit_a - profit_i) / slope))
    return ScreeningThresholds(
        kappa_low=kappa_low, kappa_high=kappa_low + lam_bar * slope, slope=slope
    )


def constrained_rule(pgp: Pgp, lam: float) -> AllocationRule:
    """Closed-form attention-constrained menu: the attentive benchmark plus
    ``lam`` times the marginal attention weight above 1/2, clipped."""
    grid = pgp.grid
    m = grid.midpoints
    density = attention_weights(pgp).w * grid.n
    q = np.clip(2.0 * m - 1.0, 0.0, 1.0)
    upper = m > 0.5
    q[upper] = np.clip(q[upper] + lam * density[upper], 0.0, 1.0)
    return allocation_rule(grid, q)


@dataclass(frozen=True, eq=False)
class ScreeningSolution:
    pgp_tag: str
    kappa: float
    rule: AllocationRule
    regime: str
    profit: float
    v_attentive: float
    v_inattentive: float
    multiplier: float | None


def optimal_screening(
    tag: str, kappa: float, n: int = DEFAULT_N, variant: str = "fold"
) -> ScreeningSolution:
    """Profit-maximizing menu and payoffs at cognitive cost ``kappa``.

    Low costs leave the attentive benchmark incentive compatible with
    attention; beyond that the seller distorts the menu to hold the
    attention value at exactly ``kappa`` (a carrot under the unbiased
    process, a stick under the biased one), until the inattentive benchmark
    becomes more profitable.
    """
    if kappa < 0:
        raise ValueError(f"cognitive cost must be >= 0, got {kappa}")
    pgp = screening_pgp(tag, n, variant)
    weights = attention_weights(pgp)
    thresholds = screening_thresholds(pgp, weights)

    if kappa <= thresholds.kappa_low:
        rule = attentive_benchmark_rule(pgp.grid)
        regime, multiplier = REGIME_ATTENTIVE_FREE, None
        profit = attentive_profit(rule)
    elif kappa >= thresholds.kappa_high:
        rule = inattentive_benchmark_rule(pgp.grid)
        regime, multiplier = REGIME_INATTENTIVE, None
        profit = inattentive_profit(envelope_mechanism(rule), pgp)
    else:
        multiplier = (kappa - thresholds.kappa_low) / thresholds.slope
        rule = constrained_rule(pgp, multiplier)
        regime = REGIME_ATTENTIVE_CONSTRAINED
        profit = attentive_profit(rule)

    mech = envelope_mechanism(rule)
    v_a = attentive_utility(mech, pgp.prior)
    v_i = v_a - value_of_attention(rule, weights)
    return ScreeningSolution(
        pgp_tag=tag,
        kappa=kappa,
        rule=rule,
        regime=regime,
        profit=profit,
        v_attentive=v_a,
        v_inattentive=v_i,
        multiplier=multiplier,
    )


def carrot_stick_curves(
    tag: str, kappas, n: int = DEFAULT_N, variant: str = "fold"
) -> list[ScreeningSolution]:
    """Agent payoffs of the optimal menu along a cost grid (figure data)."""
    return [optimal_screening(tag, float(k), n, variant) for k in kappas]

"""Welfare-maximizing provision with endogenous attention.

Two canonical mechanisms anchor the analysis: charging the production cost
("sell the firm", efficient when the agent perceives correctly or without
bias) and allocating by the informational content of each perception
("manage the process", efficient under inattention when the posterior mean
is nondecreasing). When managing the process forces more attention value
than the planner wants to induce, the optimum distorts the inattentive rule
through an attention constraint.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .attention import AttentionWeights, attention_weights, value_of_attention
from .errors import ManageInfeasibleError
from .model import (
    AllocationRule,
    CostFunction,
    Mechanism,
    Pgp,
    TypeDist,
    allocation_rule,
    envelope_mechanism,
)
from .optimize import SeparableObjective, maximize_with_attention_constraint

REGIME_SELL_ATTENTIVE = "SellFirm-Attentive"
REGIME_SELL_INATTENTIVE = "SellFirm-Inattentive"
REGIME_DISTORTED = "Distorted-Inattentive"
REGIME_MANAGE = "ManageProcess-Inattentive"

KAPPA_BAR_TOL = 1e-9


def attentive_welfare(rule: AllocationRule, prior: TypeDist, cost: CostFunction) -> float:
    """Expected surplus when the agent reports their true type."""
    q = rule.q
    return float(prior.pmf @ (prior.grid.midpoints * q - cost(q)))


def inattentive_welfare(rule: AllocationRule, pgp: Pgp, cost: CostFunction) -> float:
    """Expected surplus when reports follow the perception process."""
    q = rule.q
    return float(pgp.perceived_pmf @ (pgp.posterior_mean * q - cost(q)))


def inattentive_objective(pgp: Pgp, cost: CostFunction) -> SeparableObjective:
    """Separable objective whose value is the inattentive welfare."""
    return SeparableObjective(
        grid=pgp.grid, mass=pgp.perceived_pmf, value=pgp.posterior_mean, cost=cost
    )


def sell_the_firm(cost: CostFunction, prior: TypeDist) -> Mechanism:
    """Charge the production cost; the agent claims the whole surplus.

    Transfers are rebuilt through the envelope with the outside utility
    -C(q_0), which reproduces t = C(q) on the grid.
    """
    q = cost.argmax_allocation(prior.grid.midpoints)
    rule = allocation_rule(prior.grid, q)
    return envelope_mechanism(rule, outside_utility=-float(cost(q[0])))


def manage_the_process(pgp: Pgp, cost: CostFunction) -> Mechanism:
    """Allocate by the posterior mean of each perception on the support.

    Off-support cells are filled with the attention-minimizing monotone
    completion: the objective is linear cell by cell, so a single step
    between the bracketing fixed values is optimal within each gap and the
    step location is searched exactly.
    """
    g = pgp.grid
    support = np.flatnonzero(pgp.support)
    vals = cost.argmax_allocation(pgp.posterior_mean[support])
    drops = np.flatnonzero(np.diff(vals) < -1e-12)
    if drops.size:
        k = int(drops[0])
        raise ManageInfeasibleError(int(support[k]), int(support[k + 1]))
    vals = np.maximum.accumulate(vals)

    w = attention_weights(pgp).w
    q = np.empty(g.n)
    q[support] = vals

    def fill_gap(cells: np.ndarray, lo: float, hi: float) -> None:
        if cells.size == 0:
            return
        if hi <= lo + 1e-15:
            q[cells] = lo
            return
        gap_w = w[cells]
        suffix = np.concatenate([np.cumsum(gap_w[::-1])[::-1], [0.0]])
        split = int(np.argmin((hi - lo) * suffix))
        q[cells[:split]] = lo
        q[cells[split:]] = hi

    fill_gap(np.arange(0, support[0]), 0.0, vals[0])
    for k in range(support.size - 1):
        fill_gap(np.arange(support[k] + 1, support[k + 1]), vals[k], vals[k + 1])
    fill_gap(np.arange(support[-1] + 1, g.n), vals[-1], 1.0)

    return envelope_mechanism(allocation_rule(g, q), outside_utility=0.0)


def welfare_bounds(pgp: Pgp, cost: CostFunction) -> tuple[float, float, float]:
    """(attentive bound, inattentive bound, their gap).

    Both bounds are per-cell unconstrained maxima; monotonicity is not
    needed for the bounds themselves.
    """
    w_a = float(pgp.prior.pmf @ cost.gain(pgp.grid.midpoints))
    w_i = float(pgp.perceived_pmf @ cost.gain(pgp.posterior_mean))
    return w_a, w_i, w_a - w_i


def manage_attention_floor(pgp: Pgp, cost: CostFunction) -> float:
    """Smallest attention value over mechanisms that manage the process."""
    mech = manage_the_process(pgp, cost)
    return value_of_attention(mech.rule, attention_weights(pgp))


def extract_threshold(rule: AllocationRule, tol: float = 1e-6) -> float | None:
    """Sub-cell cutoff of a step-like rule, or None.

    A mixture of adjacent boundary cutoffs reads off as the area-matching
    interpolated cutoff; rules with a ramp wider than a few cells are not
    thresholds and yield None.
    """
    q = rule.q
    low = q <= tol
    high = q >= 1.0 - tol
    if low.all():
        return 1.0
    if high.all():
        return 0.0
    low_end = int(np.argmin(low)) if not low.all() else rule.grid.n
    if low[:low_end].size != low_end or not low[:low_end].all():
        return None
    high_idx = np.flatnonzero(high)
    if high_idx.size == 0:
        return None
    high_start = int(high_idx[0])
    if not high[high_start:].all():
        return None
    if high_start - low_end > 3:
        return None
    return float(1.0 - q.sum() * rule.grid.width)


@dataclass(frozen=True, eq=False)
class OptimalProvision:
    mechanism: Mechanism
    regime: str
    welfare: float
    nu: float
    threshold: float | None


@dataclass(eq=False)
class EfficiencyReport:
    """Welfare bounds, regime thresholds, and the optimal mechanism map.

    ``kappa_i`` is None when managing the process is infeasible (the
    posterior mean decreases somewhere); ``kappa_bar`` is None unless the
    over-attention window (kappa_star, kappa_i) is nonempty.
    """

    pgp: Pgp
    cost: CostFunction
    w_a_star: float
    w_i_star: float
    kappa_star: float
    kappa_i: float | None
    kappa_bar: float | None
    manage_feasible: bool
    _sell: Mechanism = field(repr=False)
    _manage: Mechanism | None = field(repr=False)
    _weights: AttentionWeights = field(repr=False)

    def optimal(self, kappa: float) -> OptimalProvision:
        if kappa < 0:
            raise ValueError(f"cognitive cost must be >= 0, got {kappa}")
        if not self.manage_feasible:
            if kappa <= self.kappa_star:
                return self._sell_branch(kappa, REGIME_SELL_ATTENTIVE)
            return self._sell_branch(kappa, REGIME_SELL_INATTENTIVE)
        if self.kappa_i <= self.kappa_star:
            if kappa <= self.kappa_star:
                return self._sell_branch(kappa, REGIME_SELL_ATTENTIVE)
            return self._manage_branch()
        cutoff = self.kappa_bar if self.kappa_bar is not None else self.kappa_star
        if kappa <= cutoff:
            return self._sell_branch(kappa, REGIME_SELL_ATTENTIVE)
        if kappa >= self.kappa_i:
            return self._manage_branch()
        return self._distorted_branch(kappa)

    def welfare(self, kappa: float) -> float:
        return self.optimal(kappa).welfare

    def regime(self, kappa: float) -> str:
        return self.optimal(kappa).regime

    def attentive_net(self, kappa: float) -> float:
        return self.w_a_star - kappa

    def inattentive_best(self, kappa: float) -> float:
        """Best welfare achievable while keeping the agent inattentive."""
        if self.manage_feasible and kappa >= self.kappa_i:
            return self.w_i_star
        return self._constrained(kappa).welfare

    # internal branches -----------------------------------------------------

    def _sell_branch(self, kappa: float, regime: str) -> OptimalProvision:
        nu = value_of_attention(self._sell.rule, self._weights)
        if regime == REGIME_SELL_ATTENTIVE:
            welf = self.w_a_star - kappa
        else:
            welf = inattentive_welfare(self._sell.rule, self.pgp, self.cost)
        return OptimalProvision(
            mechanism=self._sell,
            regime=regime,
            welfare=welf,
            nu=nu,
            threshold=extract_threshold(self._sell.rule),
        )

    def _manage_branch(self) -> OptimalProvision:
        nu = value_of_attention(self._manage.rule, self._weights)
        return OptimalProvision(
            mechanism=self._manage,
            regime=REGIME_MANAGE,
            welfare=self.w_i_star,
            nu=nu,
            threshold=extract_threshold(self._manage.rule),
        )

    def _distorted_branch(self, kappa: float) -> OptimalProvision:
        sol = self._constrained(kappa)
        return OptimalProvision(
            mechanism=sol.mechanism,
            regime=REGIME_DISTORTED,
            welfare=sol.welfare,
            nu=sol.nu,
            threshold=extract_threshold(sol.mechanism.rule),
        )

    def _constrained(self, kappa: float) -> OptimalProvision:
        obj = inattentive_objective(self.pgp, self.cost)
        sol = maximize_with_attention_constraint(obj, self._weights, kappa)
        mech = envelope_mechanism(sol.rule, outside_utility=0.0)
        return OptimalProvision(
            mechanism=mech,
            regime=REGIME_DISTORTED,
            welfare=obj.payoff(sol.rule),
            nu=sol.nu,
            threshold=extract_threshold(sol.rule),
        )


def efficiency_report(pgp: Pgp, cost: CostFunction) -> EfficiencyReport:
    w_a, w_i, kappa_star = welfare_bounds(pgp, cost)
    weights = attention_weights(pgp)
    sell = sell_the_firm(cost, pgp.prior)
    try:
        manage = manage_the_process(pgp, cost)
        feasible = True
        kappa_i = value_of_attention(manage.rule, weights)
    except ManageInfeasibleError:
        manage = None
        feasible = False
        kappa_i = None

    kappa_bar = None
    if feasible and kappa_i > kappa_star + 1e-12:
        obj = inattentive_objective(pgp, cost)

        def gap(kappa: float) -> float:
            sol = maximize_with_attention_constraint(obj, weights, kappa)
            return (w_a - kappa) - obj.payoff(sol.rule)

        lo = kappa_star + 1e-10
        hi = kappa_i * (1.0 - 1e-10)
        if gap(lo) <= 0.0:
            kappa_bar = kappa_star
        elif gap(hi) >= 0.0:
            kappa_bar = kappa_i
        else:
            kappa_bar = float(brentq(gap, lo, hi, xtol=KAPPA_BAR_TOL))

    return EfficiencyReport(
        pgp=pgp,
        cost=cost,
        w_a_star=w_a,
        w_i_star=w_i,
        kappa_star=kappa_star,
        kappa_i=kappa_i,
        kappa_bar=kappa_bar,
        manage_feasible=feasible,
        _sell=sell,
        _manage=manage,
        _weights=weights,
    )

"""Value of attention: linear representation, definitional oracle, maximizers.

The value of attention of a mechanism is the expected utility the agent
gains from reporting their true type instead of a perception drawn from the
process. Two routes compute it:

- ``value_of_attention``: the per-cell weight decomposition (a linear
  functional of the allocation rule),
- ``value_of_attention_direct``: the definitional double sum over the joint
  (type, perception) mass.

On a common grid the two coincide up to float accumulation for every kernel,
prior, and monotone rule; the test suite leans on this identity heavily.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError
from .model import (
    AllocationRule,
    Grid,
    Pgp,
    envelope_mechanism,
    integrated_allocation,
)


@dataclass(frozen=True, eq=False)
class AttentionWeights:
    """Signed per-cell weights w with  value(q) = sum_j q_j * w_j.

    Each weight combines the cell integral of (perceived CDF - true CDF),
    computed from boundary CDFs by the trapezoid rule, and a bias correction
    (midpoint - posterior mean) * perceived mass. The weights sum to zero, so
    constant rules generate no attention value.
    """

    grid: Grid
    w: np.ndarray  # shape (n,)

    def suffix_sums(self) -> np.ndarray:
        """Threshold values: entry k is the value of the cutoff at boundary k."""
        out = np.zeros(self.grid.n + 1)
        out[:-1] = np.cumsum(self.w[::-1])[::-1]
        return out


def attention_weights(pgp: Pgp) -> AttentionWeights:
    g = pgp.grid
    diff = pgp.perceived_cdf - pgp.prior.cdf
    cell_integral = 0.5 * (diff[:-1] + diff[1:]) * g.width
    bias = (g.midpoints - pgp.posterior_mean) * pgp.perceived_pmf
    return AttentionWeights(grid=g, w=cell_integral + bias)


def value_of_attention(rule: AllocationRule, pgp: Pgp | AttentionWeights) -> float:
    """Attention value of the mechanism induced by ``rule`` (linear form)."""
    weights = pgp if isinstance(pgp, AttentionWeights) else attention_weights(pgp)
    if not rule.grid.same_as(weights.grid):
        raise GridMismatchError(f"grid sizes differ: {rule.grid.n} vs {weights.grid.n}")
    return float(rule.q @ weights.w)


def value_of_attention_direct(rule: AllocationRule, pgp: Pgp) -> float:
    """Definitional attention value: attentive minus inattentive utility.

    Builds envelope transfers and evaluates both expectations from the joint
    mass; used as the independent oracle for ``value_of_attention``.
    """
    if not rule.grid.same_as(pgp.grid):
        raise GridMismatchError(f"grid sizes differ: {rule.grid.n} vs {pgp.grid.n}")
    mech = envelope_mechanism(rule, outside_utility=0.0)
    m = rule.grid.midpoints
    v_att = float(pgp.prior.pmf @ (m * rule.q - mech.transfers))
    post_num = (pgp.prior.pmf * m) @ pgp.kernel  # sum_i theta_i * mu[i, j]
    v_inatt = float(post_num @ rule.q - pgp.perceived_pmf @ mech.transfers)
    return v_att - v_inatt


@dataclass(frozen=True, eq=False)
class MaximizerReport:
    """All maximizers of the attention value over monotone rules.

    Threshold rules are the extreme points, so scanning every boundary cutoff
    finds the maximum. ``always_zero``/``always_one`` are half-open cell index
    ranges where every maximizer allocates 0 / 1 (empty when start == stop).
    """

    grid: Grid
    max_value: float
    argmax_cutoffs: np.ndarray  # boundary indices achieving the max within tol
    always_zero: tuple[int, int]  # cells [0, k_min)
    always_one: tuple[int, int]  # cells [k_max, n)
    threshold_values: np.ndarray  # shape (n+1,), value of each boundary cutoff


def attention_maximizers(pgp: Pgp | AttentionWeights, tol: float | None = None) -> MaximizerReport:
    """Scan all boundary cutoffs and report the maximizing family.

    ``tol`` absorbs suffix-sum rounding when collecting near-maximizers;
    the default scales with the grid size.
    """
    weights = pgp if isinstance(pgp, AttentionWeights) else attention_weights(pgp)
    values = weights.suffix_sums()
    best = float(values.max())
    if tol is None:
        tol = 1e-9 * weights.grid.n
    argmax = np.nonzero(values >= best - tol)[0]
    k_min = int(argmax.min())
    k_max = int(argmax.max())
    return MaximizerReport(
        grid=weights.grid,
        max_value=best,
        argmax_cutoffs=argmax,
        always_zero=(0, k_min),
        always_one=(k_max, weights.grid.n),
        threshold_values=values,
    )

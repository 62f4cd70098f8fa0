"""Accuracy of perception processes and agent welfare.

A process is more accurate than another when the agent is weakly better off
under it in every mechanism and at every cognitive cost. This reduces to a
pointwise comparison of a single curve per process (its value at x is the
tail integral of the perceived CDF plus the tail bias term), so deciding the
partial order is cheap.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .attention import attention_weights
from .errors import GridMismatchError, PriorMismatchError
from .model import Grid, Mechanism, Pgp, attentive_utility, inattentive_utility


@dataclass(frozen=True, eq=False)
class AccuracyCurve:
    """Curve at cell boundaries; lower values mean a more accurate process."""

    grid: Grid
    values: np.ndarray  # shape (n+1,), entry k is the curve at boundary k


def accuracy_curve(pgp: Pgp) -> AccuracyCurve:
    g = pgp.grid
    cdf = pgp.perceived_cdf
    cell_integral = 0.5 * (cdf[:-1] + cdf[1:]) * g.width
    bias = (g.midpoints - pgp.posterior_mean) * pgp.perceived_pmf
    per_cell = cell_integral + bias
    values = np.zeros(g.n + 1)
    values[:-1] = np.cumsum(per_cell[::-1])[::-1]
    return AccuracyCurve(grid=g, values=values)


class Ordering(enum.Enum):
    A_MORE = "a_more"
    B_MORE = "b_more"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


def default_accuracy_tol(n: int) -> float:
    # The curve is a double partial sum; slack scales with the grid.
    return 1e-6 * (1.0 + n / 1000.0)


def compare_accuracy(a: Pgp, b: Pgp, tol: float | None = None) -> Ordering:
    """Decide the accuracy partial order between two processes.

    Both processes must share the grid and the prior; the order is only
    defined for a fixed true-type distribution.
    """
    if not a.grid.same_as(b.grid):
        raise GridMismatchError(f"grid sizes differ: {a.grid.n} vs {b.grid.n}")
    if not np.allclose(a.prior.pmf, b.prior.pmf, atol=1e-12):
        raise PriorMismatchError("accuracy comparison requires identical priors")
    if tol is None:
        tol = default_accuracy_tol(a.grid.n)
    d = accuracy_curve(a).values - accuracy_curve(b).values
    hi = float(d.max())
    lo = float(d.min())
    if hi <= tol and lo >= -tol:
        return Ordering.EQUAL
    if hi <= tol:
        return Ordering.A_MORE
    if lo >= -tol:
        return Ordering.B_MORE
    return Ordering.INCOMPARABLE


def agent_welfare(mech: Mechanism, kappa: float, pgp: Pgp) -> float:
    """max(attentive utility - kappa, inattentive utility)."""
    if kappa < 0:
        raise ValueError(f"cognitive cost must be >= 0, got {kappa}")
    v_att = attentive_utility(mech, pgp.prior)
    v_inatt = inattentive_utility(mech, pgp)
    return max(v_att - kappa, v_inatt)


def threshold_identity_residual(pgp: Pgp) -> float:
    """Max gap between threshold attention values and curve-minus-tail-CDF.

    Internal consistency check: the value of a cutoff at boundary k equals
    the accuracy curve at k minus the tail integral of the true CDF. Both
    sides use the same trapezoid cells, so the residual is float noise.
    """
    g = pgp.grid
    thresholds = attention_weights(pgp).suffix_sums()
    curve = accuracy_curve(pgp).values
    cdf = pgp.prior.cdf
    cell = 0.5 * (cdf[:-1] + cdf[1:]) * g.width
    tail = np.zeros(g.n + 1)
    tail[:-1] = np.cumsum(cell[::-1])[::-1]
    return float(np.max(np.abs(thresholds - (curve - tail))))

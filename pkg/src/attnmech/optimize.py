"""Maximization of separable objectives over monotone allocation rules.

Three engines, by cost structure:

- weighted pool-adjacent-violators isotonic projection (exact when every
  cell has a strictly concave quadratic payoff),
- an upper-envelope solver for mixed linear/quadratic cells (exact for any
  concave per-cell payoff of the form a*q - b*q^2/2 with b >= 0),
- monotone dynamic programming over a finite level lattice (for tabulated
  costs; exact up to level quantization).

A linear attention constraint value(q) = kappa is handled by an outer
bracketed bisection on the Lagrange multiplier. The multiplier path is
monotone for any separable concave objective, and mixing the two bracket
endpoints (both maximizers of essentially the same Lagrangian) hits the
constraint exactly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .attention import AttentionWeights
from .errors import InfeasibleConstraintError, SizeLimitError
from .model import AllocationRule, CostFunction, Grid, allocation_rule

DEFAULT_TABULATED_LEVELS = 201
CONSTRAINT_BAND = 1e-7

_BRUTE_MAX_CELLS = 14
_BRUTE_MAX_LEVELS = 6


@dataclass(frozen=True, eq=False)
class SeparableObjective:
    """Per-cell payoff  mass_j * (value_j * q - C(q)) + linear_j * q."""

    grid: Grid
    mass: np.ndarray
    value: np.ndarray
    cost: CostFunction
    linear: np.ndarray | None = None

    def payoff(self, rule: AllocationRule) -> float:
        q = rule.q
        total = float(self.mass @ (self.value * q - self.cost(q)))
        if self.linear is not None:
            total += float(self.linear @ q)
        return total

    def cell_payoffs(self, levels: np.ndarray) -> np.ndarray:
        """Payoff matrix G[j, l] at allocation ``levels[l]``."""
        x = np.asarray(levels, dtype=float)
        g = self.mass[:, None] * (self.value[:, None] * x[None, :] - self.cost(x)[None, :])
        if self.linear is not None:
            g = g + self.linear[:, None] * x[None, :]
        return g

    def quad_coeffs(self) -> tuple[np.ndarray, np.ndarray] | None:
        """(a, b) with per-cell payoff a*q - b*q^2/2, or None for tabulated."""
        if self.cost.kind == "quadratic":
            alpha = self.mass * self.value
            beta = self.mass.copy()
        elif self.cost.kind == "linear":
            alpha = self.mass * (self.value - self.cost.c)
            beta = np.zeros(self.grid.n)
        else:
            return None
        if self.linear is not None:
            alpha = alpha + self.linear
        return alpha, beta


def isotonic_fit(y, w) -> np.ndarray:
    """Weighted least-squares nondecreasing fit (pool adjacent violators)."""
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    if np.any(w <= 0):
        raise ValueError("isotonic fit needs strictly positive weights")
    sums_wy: list[float] = []
    sums_w: list[float] = []
    counts: list[int] = []
    for yi, wi in zip(y, w):
        cur_wy, cur_w, cur_n = wi * yi, wi, 1
        while sums_w and sums_wy[-1] * cur_w > cur_wy * sums_w[-1]:
            cur_wy += sums_wy.pop()
            cur_w += sums_w.pop()
            cur_n += counts.pop()
        sums_wy.append(cur_wy)
        sums_w.append(cur_w)
        counts.append(cur_n)
    out = np.empty(y.size)
    pos = 0
    for swy, sw, c in zip(sums_wy, sums_w, counts):
        out[pos : pos + c] = swy / sw
        pos += c
    return out


def monotone_quadratic_argmax(alpha, beta) -> np.ndarray:
    """Exact maximizer of sum_j (alpha_j q_j - beta_j q_j^2 / 2) over
    nondecreasing q in [0, 1]^n, with beta_j >= 0 (cells may be linear).

    Works through the level-set decomposition: at each level t the best
    cutoff maximizes the suffix sum of marginal payoffs alpha - beta*t,
    and concavity makes the cutoff path monotone in t. The cutoff path is
    the upper envelope of the n+1 suffix lines, and the optimal rule reads
    off the envelope breakpoints.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if np.any(beta < 0):
        raise ValueError("curvatures must be nonnegative")
    n = alpha.size
    suffix_a = np.zeros(n + 1)
    suffix_a[:-1] = np.cumsum(alpha[::-1])[::-1]
    suffix_b = np.zeros(n + 1)
    suffix_b[:-1] = np.cumsum(beta[::-1])[::-1]

    # Upper envelope of lines h_k(t) = A_k - B_k t, k = 0..n, processed in
    # order of nondecreasing slope; ties prefer the larger k so the active
    # cutoff is nondecreasing in t.
    ks: list[int] = []
    starts: list[float] = []
    for k in range(n + 1):
        a_k, b_k = suffix_a[k], suffix_b[k]
        if ks and suffix_b[ks[-1]] == b_k:
            if suffix_a[ks[-1]] <= a_k:
                ks.pop()
                starts.pop()
            else:
                continue
        while ks:
            a_top, b_top = suffix_a[ks[-1]], suffix_b[ks[-1]]
            cross = (a_k - a_top) / (b_k - b_top)
            if cross <= starts[-1]:
                ks.pop()
                starts.pop()
            else:
                break
        starts.append(cross if ks else -np.inf)
        ks.append(k)

    bounds = np.asarray(starts[1:] + [np.inf])  # exit time per hull line
    hull = np.asarray(ks)
    idx = np.searchsorted(hull, np.arange(n), side="right")
    q = np.where(idx == 0, -np.inf, bounds[np.maximum(idx - 1, 0)])
    return np.clip(q, 0.0, 1.0)


def _solve_lin_quad(alpha, beta, grid: Grid) -> AllocationRule:
    if np.all(beta > 0):
        fit = isotonic_fit(alpha / beta, beta)
        return allocation_rule(grid, np.clip(fit, 0.0, 1.0))
    return allocation_rule(grid, monotone_quadratic_argmax(alpha, beta))


def _dp_monotone(payoffs: np.ndarray) -> np.ndarray:
    """Level indices maximizing sum_j G[j, l_j] with l nondecreasing."""
    n, m = payoffs.shape
    idx = np.arange(m)
    parents = np.empty((n, m), dtype=np.int64)
    dp = payoffs[0].copy()
    parents[0] = idx
    for j in range(1, n):
        run = np.maximum.accumulate(dp)
        arg = np.maximum.accumulate(np.where(dp >= run, idx, -1))
        parents[j] = arg
        dp = payoffs[j] + run
    levels = np.empty(n, dtype=np.int64)
    levels[-1] = int(np.argmax(dp))
    for j in range(n - 1, 0, -1):
        levels[j - 1] = parents[j][levels[j]]
    return levels


def maximize_monotone(obj: SeparableObjective, levels: int = DEFAULT_TABULATED_LEVELS) -> AllocationRule:
    """Best monotone rule for an unconstrained separable objective.

    Linear and quadratic costs are solved exactly; tabulated costs go
    through the level DP and are exact up to 1/(levels-1) quantization.
    """
    coeffs = obj.quad_coeffs()
    if coeffs is not None:
        return _solve_lin_quad(*coeffs, obj.grid)
    grid_levels = np.linspace(0.0, 1.0, levels)
    picked = _dp_monotone(obj.cell_payoffs(grid_levels))
    return allocation_rule(obj.grid, grid_levels[picked])


@dataclass(frozen=True, eq=False)
class ConstrainedSolution:
    """Result of a constrained maximization.

    ``multiplier`` is the engine-side Lagrange price on the attention value:
    positive when the constraint pushes the value below its unconstrained
    level. ``feasible`` is False only when the level DP could not reach the
    target within the band (tabulated costs); the best rule found is still
    returned.
    """

    rule: AllocationRule
    multiplier: float
    nu: float
    feasible: bool


def maximize_with_attention_constraint(
    obj: SeparableObjective,
    weights: AttentionWeights,
    kappa: float,
    band: float = CONSTRAINT_BAND,
) -> ConstrainedSolution:
    """Maximize the objective subject to attention value = kappa.

    Bracketed bisection on the multiplier; the traced value is nonincreasing
    in the multiplier for any separable concave objective. For linear and
    quadratic costs the two bracket endpoints are mixed to meet the
    constraint exactly; for tabulated costs the closest endpoint is returned
    with a flag when the band is missed.
    """
    w = weights.w
    coeffs = obj.quad_coeffs()
    mixable = coeffs is not None

    def solve(lam: float) -> AllocationRule:
        if mixable:
            alpha, beta = coeffs
            return _solve_lin_quad(alpha - lam * w, beta, obj.grid)
        shifted = SeparableObjective(
            grid=obj.grid,
            mass=obj.mass,
            value=obj.value,
            cost=obj.cost,
            linear=(-lam * w) if obj.linear is None else obj.linear - lam * w,
        )
        return maximize_monotone(shifted)

    def nu_of(rule: AllocationRule) -> float:
        return float(rule.q @ w)

    rule0 = solve(0.0)
    nu0 = nu_of(rule0)
    if abs(nu0 - kappa) <= band:
        return ConstrainedSolution(rule=rule0, multiplier=0.0, nu=nu0, feasible=True)

    # nu(lam) is nonincreasing; walk toward the target and bracket it.
    if nu0 > kappa:
        lam_lo, rule_lo, nu_lo = 0.0, rule0, nu0  # the nu >= kappa side
        lam_hi = 1.0
        while True:
            rule_hi = solve(lam_hi)
            nu_hi = nu_of(rule_hi)
            if nu_hi <= kappa:
                break
            lam_lo, rule_lo, nu_lo = lam_hi, rule_hi, nu_hi
            lam_hi *= 2.0
            if lam_hi > 1e9:
                raise InfeasibleConstraintError(kappa, nu_hi, nu0)
    else:
        lam_hi, rule_hi, nu_hi = 0.0, rule0, nu0  # the nu <= kappa side
        lam_lo = -1.0
        while True:
            rule_lo = solve(lam_lo)
            nu_lo = nu_of(rule_lo)
            if nu_lo >= kappa:
                break
            lam_hi, rule_hi, nu_hi = lam_lo, rule_lo, nu_lo
            lam_lo *= 2.0
            if lam_lo < -1e9:
                raise InfeasibleConstraintError(kappa, nu0, nu_lo)

    for _ in range(200):
        if abs(lam_hi - lam_lo) <= 1e-13 * max(1.0, abs(lam_lo), abs(lam_hi)):
            break
        mid = 0.5 * (lam_lo + lam_hi)
        rule_mid = solve(mid)
        nu_mid = nu_of(rule_mid)
        if nu_mid >= kappa:
            lam_lo, rule_lo, nu_lo = mid, rule_mid, nu_mid
        else:
            lam_hi, rule_hi, nu_hi = mid, rule_mid, nu_mid

    lam_star = 0.5 * (lam_lo + lam_hi)
    if mixable and nu_lo > nu_hi:
        share = (kappa - nu_hi) / (nu_lo - nu_hi)
        mixed = allocation_rule(obj.grid, share * rule_lo.q + (1.0 - share) * rule_hi.q)
        return ConstrainedSolution(rule=mixed, multiplier=lam_star, nu=nu_of(mixed), feasible=True)

    best = min((rule_lo, rule_hi), key=lambda r: abs(nu_of(r) - kappa))
    nu_best = nu_of(best)
    return ConstrainedSolution(
        rule=best, multiplier=lam_star, nu=nu_best, feasible=abs(nu_best - kappa) <= band
    )


def enumerate_monotone_rules(n: int, levels: int) -> np.ndarray:
    """All nondecreasing level-index sequences, one per row."""
    combos = itertools.combinations_with_replacement(range(levels), n)
    return np.asarray(list(combos), dtype=np.int64)


def brute_force_monotone(
    obj: SeparableObjective,
    levels: int = 5,
    constraint: tuple[AttentionWeights, float, float] | None = None,
) -> AllocationRule:
    """Exact optimum over monotone level-valued rules (test oracle).

    Unconstrained instances run the monotone DP; a (weights, kappa, band)
    constraint switches to exhaustive enumeration filtered by the band.
    Instance sizes are hard-capped.
    """
    n = obj.grid.n
    if n > _BRUTE_MAX_CELLS or levels > _BRUTE_MAX_LEVELS:
        raise SizeLimitError(
            f"brute force capped at n <= {_BRUTE_MAX_CELLS}, levels <= {_BRUTE_MAX_LEVELS}"
        )
    level_values = np.linspace(0.0, 1.0, levels)
    payoffs = obj.cell_payoffs(level_values)
    if constraint is None:
        picked = _dp_monotone(payoffs)
        return allocation_rule(obj.grid, level_values[picked])

    weights, kappa, band = constraint
    rules = enumerate_monotone_rules(n, levels)
    values = payoffs[np.arange(n)[None, :], rules].sum(axis=1)
    nus = level_values[rules] @ weights.w
    ok = np.abs(nus - kappa) <= band
    if not np.any(ok):
        raise InfeasibleConstraintError(kappa, float(nus.min()), float(nus.max()))
    best = np.flatnonzero(ok)[np.argmax(values[ok])]
    return allocation_rule(obj.grid, level_values[rules[best]])

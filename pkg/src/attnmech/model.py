"""Discretized screening model: grids, priors, perception processes, mechanisms.

Everything lives on a uniform grid over [0, 1]. A cell carries probability
mass; cell midpoints stand in for type and perception values, and boundary
CDFs (with mass spread uniformly inside each cell) turn every integral into
an exact finite sum for piecewise-linear integrands.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    GridMismatchError,
    InvalidDistributionError,
    InvalidGridError,
    InvalidPgpError,
    KernelError,
    MonotonicityError,
)

DEFAULT_GRID_N = 2000

# Slack for discrete incentive-compatibility checks; float accumulation over
# n = 2000 partial sums stays well inside this.
IC_SLACK = 1e-9

_SUM_TOL = 1e-12


def _frozen(a) -> np.ndarray:
    out = np.ascontiguousarray(np.asarray(a, dtype=float))
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform partition of [0, 1] into ``n`` cells."""

    n: int
    boundaries: np.ndarray  # shape (n+1,), 0 = b_0 < ... < b_n = 1
    midpoints: np.ndarray  # shape (n,)

    @property
    def width(self) -> float:
        return 1.0 / self.n

    def cell_of(self, x: float) -> int:
        """Cell containing ``x``; a value exactly on an interior boundary
        belongs to the upper cell, and 1.0 belongs to the last cell."""
        return min(int(np.floor(x * self.n)), self.n - 1)

    def same_as(self, other: "Grid") -> bool:
        return self.n == other.n


def make_grid(n: int) -> Grid:
    if n < 2:
        raise InvalidGridError(f"grid needs at least 2 cells, got {n}")
    boundaries = np.arange(n + 1) / n
    midpoints = (np.arange(n) + 0.5) / n
    return Grid(n=int(n), boundaries=_frozen(boundaries), midpoints=_frozen(midpoints))


def _check_same_grid(a: Grid, b: Grid) -> None:
    if not a.same_as(b):
        raise GridMismatchError(f"grid sizes differ: {a.n} vs {b.n}")


@dataclass(frozen=True, eq=False)
class TypeDist:
    """Probability mass of the true type over grid cells."""

    grid: Grid
    pmf: np.ndarray  # shape (n,), nonnegative, sums to 1
    cdf: np.ndarray  # shape (n+1,), CDF at cell boundaries

    @property
    def mean(self) -> float:
        return float(self.pmf @ self.grid.midpoints)


def type_dist(grid: Grid, pmf) -> TypeDist:
    pmf = np.asarray(pmf, dtype=float)
    if pmf.shape != (grid.n,):
        raise InvalidDistributionError(f"pmf shape {pmf.shape} != ({grid.n},)")
    if np.any(pmf < -_SUM_TOL):
        raise InvalidDistributionError("pmf has negative entries")
    total = pmf.sum()
    if abs(total - 1.0) > 1e-9:
        raise InvalidDistributionError(f"pmf sums to {total}, expected 1")
    pmf = np.clip(pmf, 0.0, None) / total
    cdf = np.concatenate([[0.0], np.cumsum(pmf)])
    cdf[-1] = 1.0
    return TypeDist(grid=grid, pmf=_frozen(pmf), cdf=_frozen(cdf))


def uniform_prior(grid: Grid) -> TypeDist:
    return type_dist(grid, np.full(grid.n, 1.0 / grid.n))


def point_prior(grid: Grid, at: float) -> TypeDist:
    """All mass in the cell containing ``at``."""
    pmf = np.zeros(grid.n)
    pmf[grid.cell_of(at)] = 1.0
    return type_dist(grid, pmf)


# ---------------------------------------------------------------------------
# Perception-generating processes
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Pgp:
    """Perception process on a grid: row-stochastic kernel plus prior.

    ``kernel[i, j]`` is the probability that a type in cell ``i`` perceives a
    value in cell ``j``. Derived statistics are computed eagerly:

    - ``perceived_pmf``: marginal mass of the perception per cell,
    - ``perceived_cdf``: its CDF at cell boundaries,
    - ``posterior_mean``: expected true type given the perception cell
      (set to the cell midpoint where the perception has no mass, a
      convention that never enters any mass-weighted sum).
    """

    grid: Grid
    kernel: np.ndarray  # (n, n), rows sum to 1
    prior: TypeDist
    perceived_pmf: np.ndarray  # (n,)
    perceived_cdf: np.ndarray  # (n+1,)
    posterior_mean: np.ndarray  # (n,)

    @property
    def support(self) -> np.ndarray:
        # Strictly positive mass, excluding float dust leaked by pushforward
        # rounding (at most a few ulp of a cell's mass).
        return self.perceived_pmf > 1e-12 * self.grid.width

    def joint_mass(self) -> np.ndarray:
        """Joint (type cell, perception cell) mass matrix; computed on demand."""
        return self.prior.pmf[:, None] * self.kernel


def pgp_from_kernel(grid: Grid, kernel, prior: TypeDist) -> Pgp:
    _check_same_grid(grid, prior.grid)
    kernel = np.asarray(kernel, dtype=float)
    if kernel.shape != (grid.n, grid.n):
        raise KernelError(f"kernel shape {kernel.shape} != ({grid.n}, {grid.n})")
    if np.any(kernel < -_SUM_TOL):
        raise KernelError("kernel has negative entries")
    rows = kernel.sum(axis=1)
    if np.max(np.abs(rows - 1.0)) > 1e-9:
        raise KernelError("kernel rows do not sum to 1")
    kernel = np.clip(kernel, 0.0, None) / rows[:, None]

    f_perc = prior.pmf @ kernel
    f_perc = np.clip(f_perc, 0.0, None)
    total = f_perc.sum()
    if abs(total - 1.0) > 1e-9:
        raise KernelError(f"perception marginal sums to {total}")
    num = (prior.pmf * grid.midpoints) @ kernel
    post = np.where(f_perc > 0.0, num / np.where(f_perc > 0.0, f_perc, 1.0), grid.midpoints)
    post = np.clip(post, 0.0, 1.0)
    # Law of iterated expectations must hold up to float accumulation.
    if abs(float(f_perc @ post) - prior.mean) > 1e-10:
        raise KernelError("posterior means inconsistent with the prior mean")
    cdf = np.concatenate([[0.0], np.cumsum(f_perc)])
    cdf[-1] = 1.0
    return Pgp(
        grid=grid,
        kernel=_frozen(kernel),
        prior=prior,
        perceived_pmf=_frozen(f_perc),
        perceived_cdf=_frozen(cdf),
        posterior_mean=_frozen(post),
    )


def _pushforward_kernel(grid: Grid, images: np.ndarray) -> np.ndarray:
    """Kernel of a nondecreasing deterministic map given boundary images.

    Mass of each source cell is spread over the perception cells covered by
    the image of the cell, proportionally to overlap (the map is treated as
    linear inside a cell). A degenerate image collapses to a point atom; a
    point exactly on a boundary goes to the upper cell.
    """
    lo = np.minimum(images[:-1], images[1:])
    hi = np.maximum(images[:-1], images[1:])
    if np.any(lo < -1e-12) or np.any(hi > 1.0 + 1e-12):
        raise InvalidPgpError("map image leaves [0, 1]")
    lo = np.clip(lo, 0.0, 1.0)
    hi = np.clip(hi, 0.0, 1.0)
    span = hi - lo
    b = grid.boundaries
    overlap = np.minimum(hi[:, None], b[None, 1:]) - np.maximum(lo[:, None], b[None, :-1])
    np.clip(overlap, 0.0, None, out=overlap)
    kernel = np.zeros((grid.n, grid.n))
    wide = span > 1e-13
    kernel[wide] = overlap[wide] / span[wide, None]
    for i in np.nonzero(~wide)[0]:
        kernel[i, grid.cell_of(0.5 * (lo[i] + hi[i]))] = 1.0
    return kernel


def deterministic_pgp(grid: Grid, fn: Callable[[np.ndarray], np.ndarray], prior: TypeDist) -> Pgp:
    """PGP of a nondecreasing map ``fn`` from types to perceptions."""
    images = np.asarray(fn(grid.boundaries), dtype=float)
    if np.any(np.diff(images) < -1e-12):
        raise InvalidPgpError("deterministic perception map must be nondecreasing")
    return pgp_from_kernel(grid, _pushforward_kernel(grid, images), prior)


def perfect_perception(prior: TypeDist) -> Pgp:
    """Identity process: the perception always equals the type."""
    return pgp_from_kernel(prior.grid, np.eye(prior.grid.n), prior)


def probability_weighting(alpha: float, prior: TypeDist) -> Pgp:
    """Type x perceived as x**alpha (over-optimism for alpha < 1)."""
    if alpha <= 0:
        raise InvalidPgpError(f"probability-weighting exponent must be > 0, got {alpha}")
    return deterministic_pgp(prior.grid, lambda x: np.power(x, alpha), prior)


def prelec_weighting(alpha: float, beta: float, prior: TypeDist) -> Pgp:
    """Type x perceived as exp(-beta * (-log x) ** alpha)."""
    if alpha <= 0 or beta <= 0:
        raise InvalidPgpError(f"prelec parameters must be > 0, got ({alpha}, {beta})")

    def fn(x):
        out = np.zeros_like(x)
        pos = x > 0.0
        out[pos] = np.exp(-beta * np.power(-np.log(x[pos]), alpha))
        out[x >= 1.0] = 1.0
        return out

    return deterministic_pgp(prior.grid, fn, prior)


def conservatism(alpha: float, prior: TypeDist) -> Pgp:
    """Type x perceived as alpha*x + (1-alpha)*mean, shrinking toward the prior."""
    if not 0.0 < alpha < 1.0:
        raise InvalidPgpError(f"conservatism weight must be in (0, 1), got {alpha}")
    mu = prior.mean
    return deterministic_pgp(prior.grid, lambda x: alpha * x + (1.0 - alpha) * mu, prior)


def hype(h: float, prior: TypeDist) -> Pgp:
    """With probability h the perception jumps to the maximum, else it is correct."""
    if not 0.0 <= h <= 1.0:
        raise InvalidPgpError(f"hype degree must be in [0, 1], got {h}")
    n = prior.grid.n
    kernel = (1.0 - h) * np.eye(n)
    kernel[:, n - 1] += h
    return pgp_from_kernel(prior.grid, kernel, prior)


def fictitious_information(prior: TypeDist) -> Pgp:
    """Perception drawn uniformly, independent of the type."""
    n = prior.grid.n
    return pgp_from_kernel(prior.grid, np.full((n, n), 1.0 / n), prior)


def garble(kernel, prior: TypeDist) -> Pgp:
    """PGP from an explicit row-stochastic kernel matrix."""
    return pgp_from_kernel(prior.grid, kernel, prior)


def pool_kernel(grid: Grid, block_sizes) -> np.ndarray:
    """Kernel pooling consecutive cell blocks at their center cell.

    Each block must have odd length so its mean lands exactly on a midpoint,
    which keeps the pooled process unbiased on the grid (for a uniform prior).
    """
    sizes = [int(s) for s in block_sizes]
    if sum(sizes) != grid.n:
        raise KernelError(f"block sizes sum to {sum(sizes)}, expected {grid.n}")
    if any(s <= 0 or s % 2 == 0 for s in sizes):
        raise KernelError("pool blocks must have positive odd lengths")
    kernel = np.zeros((grid.n, grid.n))
    start = 0
    for s in sizes:
        center = start + s // 2
        kernel[start : start + s, center] = 1.0
        start += s
    return kernel


_BUILTIN_PGPS = {
    "perfect": lambda params, prior: perfect_perception(prior),
    "probweight": lambda params, prior: probability_weighting(params["alpha"], prior),
    "prelec": lambda params, prior: prelec_weighting(params["alpha"], params["beta"], prior),
    "conservatism": lambda params, prior: conservatism(params["alpha"], prior),
    "hype": lambda params, prior: hype(params["h"], prior),
    "fictitious": lambda params, prior: fictitious_information(prior),
    "garble": lambda params, prior: garble(np.asarray(params["matrix"], dtype=float), prior),
    "pool": lambda params, prior: garble(pool_kernel(prior.grid, params["blocks"]), prior),
}


def builtin_pgp(kind: str, params: dict | None, prior: TypeDist) -> Pgp:
    """Construct a named perception process; see ``_BUILTIN_PGPS`` for kinds."""
    try:
        factory = _BUILTIN_PGPS[kind]
    except KeyError:
        raise InvalidPgpError(f"unknown pgp kind {kind!r}") from None
    return factory(params or {}, prior)


def is_unbiased(pgp: Pgp, tol: float = 1e-8) -> bool:
    """True iff the posterior mean equals the perceived value on the support."""
    err = np.abs(pgp.posterior_mean - pgp.grid.midpoints)
    return bool(np.all(err[pgp.support] <= tol))


# ---------------------------------------------------------------------------
# Allocation rules and mechanisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AllocationRule:
    """Nondecreasing per-cell allocation with values in [0, 1]."""

    grid: Grid
    q: np.ndarray  # shape (n,)


def allocation_rule(grid: Grid, q) -> AllocationRule:
    q = np.asarray(q, dtype=float)
    if q.shape != (grid.n,):
        raise MonotonicityError(f"rule shape {q.shape} != ({grid.n},)")
    if np.any(q < -1e-9) or np.any(q > 1.0 + 1e-9):
        raise MonotonicityError("allocation values leave [0, 1]")
    if np.any(np.diff(q) < -1e-9):
        raise MonotonicityError("allocation rule decreases somewhere")
    q = np.maximum.accumulate(np.clip(q, 0.0, 1.0))
    return AllocationRule(grid=grid, q=_frozen(q))


def constant_rule(grid: Grid, level: float) -> AllocationRule:
    return allocation_rule(grid, np.full(grid.n, float(level)))


def threshold_rule(grid: Grid, cutoff_index: int) -> AllocationRule:
    """Allocate 1 to every cell at or above boundary ``cutoff_index``."""
    if not 0 <= cutoff_index <= grid.n:
        raise MonotonicityError(f"cutoff index {cutoff_index} outside [0, {grid.n}]")
    q = np.zeros(grid.n)
    q[cutoff_index:] = 1.0
    return allocation_rule(grid, q)


@dataclass(frozen=True, eq=False)
class Mechanism:
    """Allocation rule with transfers pinned down by incentive compatibility."""

    rule: AllocationRule
    outside_utility: float
    transfers: np.ndarray  # shape (n,)

    @property
    def grid(self) -> Grid:
        return self.rule.grid


def integrated_allocation(rule: AllocationRule) -> np.ndarray:
    """Discrete integral of the rule from 0 up to each cell midpoint.

    Full cells below contribute q/n; the current cell contributes its half
    width. This choice makes the discrete mechanism exactly incentive
    compatible for every nondecreasing rule.
    """
    q = rule.q
    n = rule.grid.n
    below = (np.cumsum(q) - q) / n
    return below + q * (0.5 / n)


def envelope_mechanism(rule: AllocationRule, outside_utility: float = 0.0) -> Mechanism:
    """Mechanism whose transfers follow the incentive-compatibility envelope."""
    integ = integrated_allocation(rule)
    t = rule.grid.midpoints * rule.q - integ - outside_utility
    return Mechanism(rule=rule, outside_utility=float(outside_utility), transfers=_frozen(t))


def ic_slack(mech: Mechanism) -> float:
    """Largest gain from misreporting; nonpositive means IC holds exactly."""
    m = mech.grid.midpoints
    u = m[:, None] * mech.rule.q[None, :] - mech.transfers[None, :]
    truth = np.diag(u)
    return float(np.max(u - truth[:, None]))


def attentive_utility(mech: Mechanism, prior: TypeDist) -> float:
    """Expected truthful utility when the perception equals the type."""
    _check_same_grid(mech.grid, prior.grid)
    m = mech.grid.midpoints
    return float(prior.pmf @ (m * mech.rule.q - mech.transfers))


def inattentive_utility(mech: Mechanism, pgp: Pgp) -> float:
    """Expected utility when reports follow the perception process."""
    _check_same_grid(mech.grid, pgp.grid)
    gain = pgp.posterior_mean * pgp.perceived_pmf * mech.rule.q
    return float(np.sum(gain - pgp.perceived_pmf * mech.transfers))


# ---------------------------------------------------------------------------
# Provision costs
# ---------------------------------------------------------------------------

_TAB_CANDIDATES = 2001


@dataclass(frozen=True, eq=False)
class CostFunction:
    """Cost of producing an allocation level in [0, 1].

    Variants: ``linear`` (c*x), ``quadratic`` (x**2/2), and ``tabulated``
    (piecewise-linear through equally spaced knots).
    """

    kind: str
    c: float = 0.0
    knots: np.ndarray | None = None  # tabulated values at linspace(0, 1, M)

    @staticmethod
    def linear(c: float) -> "CostFunction":
        return CostFunction(kind="linear", c=float(c))

    @staticmethod
    def quadratic() -> "CostFunction":
        return CostFunction(kind="quadratic")

    @staticmethod
    def tabulated(values) -> "CostFunction":
        values = np.asarray(values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise InvalidDistributionError("tabulated cost needs >= 2 knot values")
        return CostFunction(kind="tabulated", knots=_frozen(values))

    @staticmethod
    def from_callable(fn: Callable[[np.ndarray], np.ndarray], levels: int = 201) -> "CostFunction":
        xs = np.linspace(0.0, 1.0, levels)
        return CostFunction.tabulated(np.asarray(fn(xs), dtype=float))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "linear":
            return self.c * x
        if self.kind == "quadratic":
            return 0.5 * x * x
        xs = np.linspace(0.0, 1.0, self.knots.size)
        return np.interp(x, xs, self.knots)

    def argmax_allocation(self, values) -> np.ndarray:
        """Smallest maximizer of v*x - C(x) over x in [0, 1], per entry of v."""
        v = np.atleast_1d(np.asarray(values, dtype=float))
        if self.kind == "linear":
            return np.where(v > self.c, 1.0, 0.0)
        if self.kind == "quadratic":
            return np.clip(v, 0.0, 1.0)
        knots_x = np.linspace(0.0, 1.0, self.knots.size)
        cand = np.union1d(knots_x, np.linspace(0.0, 1.0, _TAB_CANDIDATES))
        payoff = v[:, None] * cand[None, :] - self(cand)[None, :]
        best = payoff.max(axis=1)
        first = np.argmax(payoff >= best[:, None] - 1e-15, axis=1)
        return cand[first]

    def gain(self, values) -> np.ndarray:
        """max_x v*x - C(x) per entry of v."""
        v = np.atleast_1d(np.asarray(values, dtype=float))
        x = self.argmax_allocation(v)
        return v * x - self(x)

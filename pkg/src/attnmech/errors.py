"""Exception types shared across the package."""


class AttnMechError(Exception):
    """Base class for all package errors."""


class InvalidGridError(AttnMechError):
    """Grid construction with invalid parameters (e.g. fewer than 2 cells)."""


class InvalidDistributionError(AttnMechError):
    """Probability mass vector that is negative or does not sum to one."""


class InvalidPgpError(AttnMechError):
    """Perception process parameters out of range."""


class KernelError(InvalidPgpError):
    """Perception kernel that is not row-stochastic or mis-shaped."""


class MonotonicityError(AttnMechError):
    """Allocation rule that decreases somewhere (incentive compatibility fails)."""


class GridMismatchError(AttnMechError):
    """Objects built on different grids combined in one computation."""


class PriorMismatchError(AttnMechError):
    """Accuracy comparison between processes with different priors."""


class SizeLimitError(AttnMechError):
    """Brute-force oracle invoked beyond its instance-size limits."""


class InfeasibleConstraintError(AttnMechError):
    """Attention constraint value outside the achievable range.

    Carries the achievable range observed along the Lagrangian frontier.
    """

    def __init__(self, kappa, nu_min, nu_max):
        self.kappa = kappa
        self.nu_min = nu_min
        self.nu_max = nu_max
        super().__init__(
            f"target attention value {kappa} outside achievable range "
            f"[{nu_min}, {nu_max}]"
        )


class ManageInfeasibleError(AttnMechError):
    """No monotone rule matches the per-perception efficient allocation.

    Carries the first offending pair of adjacent support cells.
    """

    def __init__(self, cell_lo, cell_hi):
        self.cell_lo = cell_lo
        self.cell_hi = cell_hi
        super().__init__(
            f"efficient allocation decreases between support cells "
            f"{cell_lo} and {cell_hi}; no incentive-compatible mechanism"
        )


class ScenarioError(AttnMechError):
    """Scenario file that fails schema validation."""

"""Exception types shared across the package."""


class SplitDampError(Exception):
    """Base class for all library errors."""


class ConfigError(SplitDampError):
    """Invalid experiment configuration."""


class DomainError(SplitDampError):
    """A configuration point lies inside the guarded singular region."""


class NegativeRateError(SplitDampError):
    """A dissipation field produced a negative energy-loss rate."""


class DimensionError(SplitDampError):
    """Matrix input outside the supported small-dense regime."""


class StepError(SplitDampError):
    """A trajectory step failed; carries the zero-based step index."""

    def __init__(self, step_index, message):
        super().__init__(f"step {step_index}: {message}")
        self.step_index = step_index


class SolverError(SplitDampError):
    """A diagnostic sub-solver failed."""


class NoConvergenceError(SolverError):
    """Iteration budget exhausted before reaching tolerance."""


class DegenerateMomentumError(SolverError):
    """Momentum value at which the reduced equilibrium problem degenerates."""


class GridMismatchError(SplitDampError):
    """Two trajectories do not share the same time grid."""

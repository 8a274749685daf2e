"""Exception types shared across the package."""


class CrpairsError(Exception):
    """Base class for all package-specific errors."""


class InvalidConfigError(CrpairsError):
    """Model parameters violate an invariant (negative rate, scenario mismatch...)."""


class DomainError(CrpairsError):
    """An input lies outside the mathematical domain of an operation."""


class InfeasibleRootError(CrpairsError):
    """No root of the defining polynomial lies in the physically feasible interval.

    Carries every real candidate root so callers can diagnose the failure.
    """

    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = tuple(candidates)


class ConvergenceError(CrpairsError):
    """An iterative solver failed to reach its residual target."""

    def __init__(self, message, last_iterate=None, residual=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual


class BoundaryFixedPointError(CrpairsError):
    """Newton refinement converged, but onto the boundary (some abundance pinned at 0).

    Distinct from divergence: the point itself is valid, it just is not an
    interior coexistence fixed point.  The converged point is attached.
    """

    def __init__(self, message, fixed_point=None):
        super().__init__(message)
        self.fixed_point = fixed_point


class SingularSystemError(CrpairsError):
    """The linear system assembled for the steady state is singular."""


class InfeasibleRegimeError(CrpairsError):
    """A closed-form steady state produced a non-positive abundance.

    Reports which species the formula drives out of the positive cone.
    """

    def __init__(self, message, negative_species=()):
        super().__init__(message)
        self.negative_species = tuple(negative_species)


class DegenerateParameterError(CrpairsError):
    """Parameters sit exactly on a measure-zero degeneracy of a closed form."""


class StiffnessError(CrpairsError):
    """The adaptive integrator underflowed its step size."""

    def __init__(self, message, t=None, state=None):
        super().__init__(message)
        self.t = t
        self.state = state


class TrajectoryTooShortError(CrpairsError):
    """A trajectory is too short for the requested tail analysis."""


class NoCrossingError(CrpairsError):
    """A scan found no sign change of the quantity being bracketed."""


class FrameDegeneracyError(CrpairsError):
    """The tangent frame collapsed during Lyapunov-spectrum accumulation."""


class StatisticalPowerError(CrpairsError):
    """Too few events were recorded for a meaningful rate estimate."""

    def __init__(self, message, n_events=0):
        super().__init__(message)
        self.n_events = n_events


class SpecValidationError(CrpairsError):
    """An experiment spec file failed validation; carries field diagnostics."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class EngineError(CrpairsError):
    """An engine failed while executing an experiment."""

"""Exception hierarchy shared by every module of the package."""


class QJacobiError(Exception):
    """Base class for all numerical failures raised by :mod:`qjacobi`."""


class DomainError(QJacobiError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class MaxTermsExceeded(QJacobiError):
    """A series, product or iteration did not meet its stopping rule in budget."""


class Divergent(QJacobiError):
    """Terms of a series kept growing; the series is taken to diverge."""


class DivergentIntegral(Divergent):
    """A Jackson integrand failed to decay at one end of the lattice."""


class BracketNotFound(QJacobiError):
    """Fewer sign changes than requested were found inside the search window."""


class ConvergenceFailure(QJacobiError):
    """An iterative solver could not reach the requested accuracy."""


class NoConvergence(ConvergenceFailure):
    """A limit sequence did not settle within its iteration budget."""


class CancellationLoss(QJacobiError):
    """A subtraction lost more digits than the caller allowed."""


class PrecisionFloor(QJacobiError):
    """Values dropped below the level that the error estimate can resolve."""


class OutOfRegion(DomainError):
    """A parameter falls outside a convergence guard."""


class PoleError(DomainError):
    """Evaluation requested too close to a pole."""


class RecurrenceOverflow(QJacobiError, OverflowError):
    """A forward recurrence left the representable floating point range."""


class PoleWarning(UserWarning):
    """Evaluation point is close to a ray on which a closed form is singular."""

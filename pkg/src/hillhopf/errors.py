"""Exception hierarchy.

Two roots: :class:`DomainError` for inputs outside an operation's
preconditions and :class:`NumericalError` for failures of an iterative or
integration procedure. The command line maps them to exit codes 2 and 3.
"""


class HillError(Exception):
    """Base class of every error raised by this package."""


class DomainError(HillError, ValueError):
    """An argument lies outside the domain of the operation."""


class SingularityError(DomainError):
    """Evaluation requested at the collision singularity R = 0."""


class DegenerateStateError(DomainError):
    """A chart is singular at the requested state (e.g. zero action)."""


class FamilyNotPresentError(DomainError):
    """The requested equilibrium family does not exist for that L'."""


class NumericalError(HillError, RuntimeError):
    """A numerical procedure failed."""


class CollisionError(NumericalError):
    """The trajectory came closer to the primary than the guard radius."""


class IntegrationError(NumericalError):
    """The integrator could not complete the requested span."""


class ConvergenceError(NumericalError):
    """A Newton-type iteration diverged or ran out of iterations."""


class SingularJacobianError(NumericalError):
    """The Newton matrix is rank deficient."""


class StepCollapseError(NumericalError):
    """Continuation step size fell below its lower bound."""

"""Lissajous orbits about the L1 point of the Hill problem by averaging.

Modules
-------
hill
    Hamiltonian, vector field and expansion about the libration point.
linear
    Linear decoupling and the constants of the perturbation theory.
center_manifold
    Centre-manifold Hamiltonian and the saddle-reduction map.
lissajous
    Lissajous variables, averaging tables and the normalised Hamiltonian.
hopf
    Reduced flow on the sphere, equilibria and bifurcation thresholds.
propagation
    Numerical integration, state-transition matrices and stability indices.
orbits
    Orbit synthesis, differential correction and family continuation.
"""

from .errors import (
    CollisionError, ConvergenceError, DegenerateStateError, DomainError,
    FamilyNotPresentError, HillError, IntegrationError, NumericalError,
    SingularityError, SingularJacobianError, StepCollapseError,
)
from .linear import build_constants

__version__ = "0.1.0"

__all__ = [
    "CollisionError", "ConvergenceError", "DegenerateStateError", "DomainError",
    "FamilyNotPresentError", "HillError", "IntegrationError", "NumericalError",
    "SingularityError", "SingularJacobianError", "StepCollapseError", "build_constants",
]

"""Two-centre (Euler) problem in canonical K-coordinates.

Numerical library for the Euler Hamiltonian and its Euler integral, the
partially averaged Newtonian potential, planar phase portraits of the
secular dynamics, and integration of the planar three-body problem in
K-coordinates.
"""

from .errors import CollisionError, DomainError, NumericsError
from .kepler import MassParams, OrbitalElements, elements_from_actions, solve_kepler
from .kmap import (
    CartesianState,
    KCoords,
    PlanarKCoords,
    canonicity_residual,
    cartesian_to_k,
    k_to_cartesian,
    k_to_cartesian_planar,
)
from .hamiltonians import (
    e0_in_k,
    e_in_k,
    euler_integral_cartesian,
    euler_integral_elliptic,
    euler_integral_symmetric,
    j_in_k,
    two_centre_energy_cartesian,
)
from .secular import QuadratureSpec, average_potential, ei_params, f_tilde
from .portrait import (
    aa_action,
    aa_transform,
    classify_regime,
    collision_orbit,
    critical_points,
    ehat0,
    separatrices,
)
from .dynamics import (
    IntegratorConfig,
    ThreeBodyState,
    integrate,
    run_paper_experiment,
    threebody_hamiltonian,
)

__all__ = [
    "e0_in_k",
    "e_in_k",
    "euler_integral_cartesian",
    "euler_integral_elliptic",
    "euler_integral_symmetric",
    "j_in_k",
    "two_centre_energy_cartesian",
    "QuadratureSpec",
    "average_potential",
    "ei_params",
    "f_tilde",
    "aa_action",
    "aa_transform",
    "classify_regime",
    "collision_orbit",
    "critical_points",
    "ehat0",
    "separatrices",
    "IntegratorConfig",
    "ThreeBodyState",
    "integrate",
    "run_paper_experiment",
    "threebody_hamiltonian",
    "CollisionError",
    "DomainError",
    "NumericsError",
    "MassParams",
    "OrbitalElements",
    "elements_from_actions",
    "solve_kepler",
    "CartesianState",
    "KCoords",
    "PlanarKCoords",
    "canonicity_residual",
    "cartesian_to_k",
    "k_to_cartesian",
    "k_to_cartesian_planar",
]

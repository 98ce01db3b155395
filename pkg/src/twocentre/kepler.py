"""Kepler equation and orbital-element computations.

Everything here is elliptic-only: eccentricities are restricted to [0, 1)
and negative Kepler energies are assumed throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, NumericsError

TWO_PI = 2.0 * math.pi

_MAX_ITER = 64


@dataclass(frozen=True)
class MassParams:
    """Mass parameters of the problem.

    m       reduced mass of the moving body
    M       gravitational mass of the primary centre (at the origin)
    Mprime  gravitational mass of the secondary centre (at x')
    m0      heliocentric body mass, used only by the three-body Hamiltonian
    """

    m: float
    M: float
    Mprime: float
    m0: float = 1.0

    def __post_init__(self):
        if not (self.m > 0.0 and self.M > 0.0 and self.m0 > 0.0):
            raise DomainError("masses m, M, m0 must be strictly positive")
        # Mprime = 0 is admitted: it is the Keplerian limit used by several
        # identities (the secondary centre simply disappears).
        if self.Mprime < 0.0:
            raise DomainError("Mprime must be nonnegative")


@dataclass(frozen=True)
class OrbitalElements:
    """Instantaneous elements of the ellipse of (y, x).

    a    semi-major axis
    e    eccentricity
    xi   eccentric anomaly
    nu   true anomaly
    rho  radial factor 1 - e*cos(xi)  (= |x|/a)
    p    projection factor, equal to rho*cos(nu + gbar)
    """

    a: float
    e: float
    xi: float
    nu: float
    rho: float
    p: float


def solve_kepler(e: float, ell: float, tol: float = 1e-14) -> float:
    """Solve xi - e*sin(xi) = ell for the eccentric anomaly xi.

    Newton iteration seeded with xi0 = ell + e*sin(ell); any Newton step
    leaving the bracket [ell - e, ell + e] is replaced by a bisection step.
    The mean anomaly is reduced mod 2*pi internally and the solution is
    returned on the branch containing ell (xi - ell is in [-e, e]).
    """
    if not (0.0 <= e < 1.0):
        raise DomainError(f"eccentricity {e} outside [0, 1)")
    if not tol > 0.0:
        raise DomainError("tol must be positive")
    # reduce to [-pi, pi) to keep the bracket symmetric and well conditioned
    ell_r = math.remainder(ell, TWO_PI)
    shift = ell - ell_r
    lo, hi = ell_r - e, ell_r + e
    xi = ell_r + e * math.sin(ell_r)
    for _ in range(_MAX_ITER):
        f = xi - e * math.sin(xi) - ell_r
        if abs(f) < tol:
            return xi + shift
        if f > 0.0:
            hi = min(hi, xi)
        else:
            lo = max(lo, xi)
        step = f / (1.0 - e * math.cos(xi))
        cand = xi - step
        if cand <= lo or cand >= hi:
            cand = 0.5 * (lo + hi)
        xi = cand
    raise NumericsError(
        f"Kepler solver did not reach |residual| < {tol} in {_MAX_ITER} iterations "
        f"(e={e}, ell={ell})"
    )


def eccentricity(L: float, G: float) -> float:
    """e(L, G) = sqrt(1 - G^2/L^2) for actions 0 < G <= L."""
    if not (0.0 < G <= L):
        raise DomainError(f"actions must satisfy 0 < G <= L, got G={G}, L={L}")
    return math.sqrt(max(0.0, 1.0 - (G / L) ** 2))


def semi_major_axis(L: float, masses: MassParams) -> float:
    """a(L) = L^2 / (m^2 M)."""
    return L * L / (masses.m ** 2 * masses.M)


def elements_from_actions(
    L: float,
    G: float,
    ell: float,
    masses: MassParams,
    gbar: float = 0.0,
    tol: float = 1e-14,
) -> OrbitalElements:
    """Orbital elements from the (L, G) actions and the mean anomaly.

    The perihelion angle gbar enters only the projection factor p.
    """
    e = eccentricity(L, G)
    a = semi_major_axis(L, masses)
    xi = solve_kepler(e, ell, tol=tol)
    c, s = math.cos(xi), math.sin(xi)
    rho = 1.0 - e * c
    nu = math.atan2((G / L) * s, c - e)
    p = (c - e) * math.cos(gbar) - (G / L) * s * math.sin(gbar)
    return OrbitalElements(a=a, e=e, xi=xi, nu=nu, rho=rho, p=p)

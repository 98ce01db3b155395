"""The Euler Hamiltonian and the Euler integral in four coordinate systems.

The same two quantities (energy and the extra first integral of the
two-centre problem) are evaluated in Cartesian impulse-position
variables, in the symmetric centre configuration, in elliptic
coordinates, and in K-coordinates, so that each route cross-validates
the others.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import CollisionError, DomainError
from .kepler import MassParams, elements_from_actions
from .kmap import CartesianState, KCoords

_TINY = 1e-12


def _norm(v: np.ndarray) -> float:
    return float(np.linalg.norm(v))


def two_centre_energy_cartesian(s: CartesianState, masses: MassParams) -> float:
    """J = |y|^2/(2m) - m*M/|x| - m*Mprime/|x'-x|."""
    rx = _norm(s.x)
    sep = _norm(s.xprime - s.x)
    if rx < _TINY or sep < _TINY:
        raise CollisionError("collision configuration: |x| or |x'-x| vanishes")
    m = masses.m
    return float(np.dot(s.y, s.y)) / (2.0 * m) - m * masses.M / rx - m * masses.Mprime / sep


def kepler_energy_cartesian(s: CartesianState, masses: MassParams) -> float:
    """The Keplerian part |y|^2/(2m) - m*M/|x|."""
    rx = _norm(s.x)
    if rx < _TINY:
        raise CollisionError("collision with the primary centre")
    return float(np.dot(s.y, s.y)) / (2.0 * masses.m) - masses.m * masses.M / rx


def eccentricity_vector(s: CartesianState, masses: MassParams) -> np.ndarray:
    """L = y x M - m^2*M * x/|x| (length m^2*M*e, points at perihelion)."""
    M = np.cross(s.x, s.y)
    return np.cross(s.y, M) - masses.m ** 2 * masses.M * s.x / _norm(s.x)


def euler_integral_cartesian(s: CartesianState, masses: MassParams) -> float:
    """E = |M|^2 - x'.L + m^2*Mprime*((x'-x).x')/|x'-x|."""
    sep = _norm(s.xprime - s.x)
    if sep < _TINY:
        raise CollisionError("collision with the secondary centre")
    M = np.cross(s.x, s.y)
    Lvec = eccentricity_vector(s, masses)
    e0 = float(np.dot(M, M) - np.dot(s.xprime, Lvec))
    e1 = masses.m ** 2 * masses.Mprime * float(np.dot(s.xprime - s.x, s.xprime)) / sep
    return e0 + e1


def euler_integral_symmetric(
    u: np.ndarray, v: np.ndarray, v0: np.ndarray, mplus: float, mminus: float
) -> float:
    """Euler integral for a unit mass between centres at +-v0.

    E = |v x u|^2 + (v0.u)^2 + 2 v.v0 (mplus/|v+v0| - mminus/|v-v0|).
    """
    rp = _norm(v + v0)
    rm = _norm(v - v0)
    if rp < _TINY or rm < _TINY:
        raise CollisionError("particle at one of the centres")
    cr = np.cross(v, u)
    return (
        float(np.dot(cr, cr))
        + float(np.dot(v0, u)) ** 2
        + 2.0 * float(np.dot(v, v0)) * (mplus / rp - mminus / rm)
    )


def euler_integral_elliptic(
    u: np.ndarray, v: np.ndarray, v0: np.ndarray, mplus: float, mminus: float
) -> float:
    """Euler integral evaluated through planar elliptic coordinates.

    The state is converted to (lambda, beta) and their conjugate momenta
    via the spherical scalars (Theta, |M|, R) relative to v0; the value
    returned is the half-difference of the two separated pieces of the
    Hamilton-Jacobi splitting, evaluated on shell.
    """
    r0 = _norm(v0)
    if r0 < _TINY:
        raise DomainError("merging centres: elliptic coordinates undefined")
    rp = _norm(v + v0)
    rm = _norm(v - v0)
    if rp < _TINY or rm < _TINY:
        raise CollisionError("particle at one of the centres")
    lam = 0.5 * (rp + rm) / r0
    beta = 0.5 * (rp - rm) / r0
    if lam <= 1.0 + _TINY or abs(beta) >= 1.0 - _TINY:
        raise DomainError("degenerate elliptic coordinates (collinear configuration)")

    r = _norm(v)
    M = np.cross(v, u)
    Mn = _norm(M)
    if Mn < _TINY:
        raise DomainError("vanishing angular momentum: spherical angles undefined")
    Theta = float(np.dot(M, v0)) / r0
    R = float(np.dot(u, v)) / r

    # on-shell energy of the symmetric Hamiltonian
    h = 0.5 * R * R + 0.5 * Mn * Mn / (r * r) - mplus / rp - mminus / rm

    lb = lam * lam + beta * beta - 1.0
    disc = (1.0 - beta * beta) * (lam * lam - 1.0) * Mn * Mn - lb * Theta * Theta
    disc = max(disc, 0.0)
    # the generating function fixes one branch of the square root; the
    # mirror branch (particle on the other side of the node) flips its sign
    sigma_m = 1.0 if float(np.dot(v, np.cross(v0, M))) >= 0.0 else -1.0
    root = sigma_m * math.sqrt(disc)
    plam = r0 * lam * R / math.sqrt(lb) - beta * root / (lb * (lam * lam - 1.0))
    pbeta = r0 * beta * R / math.sqrt(lb) + lam * root / (lb * (1.0 - beta * beta))

    return (
        0.5 * pbeta * pbeta * (1.0 - beta * beta)
        - 0.5 * plam * plam * (lam * lam - 1.0)
        + 0.5 * Theta * Theta * (1.0 / (1.0 - beta * beta) - 1.0 / (lam * lam - 1.0))
        + r0 * (mplus * (lam + beta) + mminus * (lam - beta))
        + r0 * r0 * (lam * lam + beta * beta) * h
    )


def _asymmetric_to_symmetric(s: CartesianState, masses: MassParams):
    """Change of variables taking centres at (0, x') to centres at +-v0."""
    v0 = 0.5 * s.xprime
    v = s.x - v0
    u = s.y / masses.m
    return u, v, v0


def euler_integral_via_symmetric(s: CartesianState, masses: MassParams) -> float:
    """E = E0 + E1 recovered from the symmetric formula.

    The symmetric-configuration integral evaluated on the transformed
    state equals (E0 + E1 + E2)/m^2, where E2 = m*(|x'|^2/2)*J is itself
    a first integral and is subtracted off.
    """
    u, v, v0 = _asymmetric_to_symmetric(s, masses)
    e_sym = euler_integral_symmetric(u, v, v0, masses.M, masses.Mprime)
    e2 = masses.m * 0.5 * _norm(s.xprime) ** 2 * two_centre_energy_cartesian(s, masses)
    return masses.m ** 2 * e_sym - e2


def euler_integral_via_elliptic(s: CartesianState, masses: MassParams) -> float:
    """E = E0 + E1 recovered from the elliptic-coordinate formula."""
    u, v, v0 = _asymmetric_to_symmetric(s, masses)
    e_ell = euler_integral_elliptic(u, v, v0, masses.M, masses.Mprime)
    e2 = masses.m * 0.5 * _norm(s.xprime) ** 2 * two_centre_energy_cartesian(s, masses)
    return masses.m ** 2 * e_ell - e2


def e2_value(s: CartesianState, masses: MassParams) -> float:
    """The neglected additive integral E2 = m*(|x'|^2/2)*J."""
    return masses.m * 0.5 * _norm(s.xprime) ** 2 * two_centre_energy_cartesian(s, masses)


# ---------------------------------------------------------------------------
# K-coordinate expressions
# ---------------------------------------------------------------------------


def _k_geometry(L, G, Theta, r, ell, gbar, masses: MassParams):
    if not (0.0 < G <= L):
        raise DomainError(f"actions must satisfy 0 < G <= L, got G={G}, L={L}")
    if abs(Theta) > G:
        raise DomainError("|Theta| must not exceed G")
    el = elements_from_actions(L, G, ell, masses, gbar=gbar)
    w = math.sqrt(max(0.0, 1.0 - (Theta / G) ** 2))
    d2 = r * r + 2.0 * r * el.a * w * el.p + el.a ** 2 * el.rho ** 2
    return el, w, d2


def j_in_k(k: KCoords, masses: MassParams) -> float:
    """Two-centre energy in K-coordinates."""
    el, w, d2 = _k_geometry(k.L, k.G, k.Theta, k.r, k.ell, k.gbar, masses)
    if d2 <= _TINY:
        raise CollisionError("collision configuration in K-coordinates")
    m = masses.m
    return -(m ** 3) * masses.M ** 2 / (2.0 * k.L ** 2) - m * masses.Mprime / math.sqrt(d2)


def e0_in_k(
    L: float, G: float, Theta: float, r: float, gbar: float, masses: MassParams
) -> float:
    """The Keplerian-limit part E0 of the Euler integral.

    E0 = G^2 + m^2*M * r * sqrt(1 - Theta^2/G^2) * e * cos(gbar).
    The coefficient is the primary mass M (it enters through the
    eccentricity vector), independent of the mean anomaly.
    """
    if not (0.0 < G <= L):
        raise DomainError(f"actions must satisfy 0 < G <= L, got G={G}, L={L}")
    if abs(Theta) > G:
        raise DomainError("|Theta| must not exceed G")
    w = math.sqrt(max(0.0, 1.0 - (Theta / G) ** 2))
    e = math.sqrt(max(0.0, 1.0 - (G / L) ** 2))
    return G * G + masses.m ** 2 * masses.M * r * w * e * math.cos(gbar)


def e_in_k(k: KCoords, masses: MassParams) -> float:
    """Euler integral E = E0 + E1 in K-coordinates."""
    el, w, d2 = _k_geometry(k.L, k.G, k.Theta, k.r, k.ell, k.gbar, masses)
    if d2 <= _TINY:
        raise CollisionError("collision configuration in K-coordinates")
    e0 = e0_in_k(k.L, k.G, k.Theta, k.r, k.gbar, masses)
    e1 = (
        masses.m ** 2
        * masses.Mprime
        * k.r
        * (k.r + el.a * w * el.p)
        / math.sqrt(d2)
    )
    return e0 + e1

"""The canonical map between K-coordinates and Cartesian states.

K-coordinates are twelve canonical variables built from a chain of
reference frames: the invariable frame of the total angular momentum C,
the frame attached to the fixed-centre direction x', and the frame of the
orbital angular momentum M. The map, its planar reduction, the inverse,
and a finite-difference symplecticity check live here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericsError
from .kepler import TWO_PI, MassParams, eccentricity, semi_major_axis, solve_kepler

# relative margin below which a node / eccentricity is treated as vanishing
_DEGEN = 1e-9

_I3 = np.eye(3)
_KHAT = np.array([0.0, 0.0, 1.0])
_IHAT = np.array([1.0, 0.0, 0.0])
_JHAT = np.array([0.0, 1.0, 0.0])


def rot1(alpha: float) -> np.ndarray:
    """Rotation about the first axis."""
    c, s = math.cos(alpha), math.sin(alpha)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot3(alpha: float) -> np.ndarray:
    """Rotation about the third axis."""
    c, s = math.cos(alpha), math.sin(alpha)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def oriented_angle(w: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
    """Oriented angle from u to v around w, in [0, 2*pi).

    u and v are first projected orthogonal to w; they must not be
    (numerically) parallel to w.
    """
    nw = np.linalg.norm(w)
    if nw < _DEGEN:
        raise DomainError("oriented_angle: reference axis vanishes")
    what = w / nw
    up = u - np.dot(u, what) * what
    vp = v - np.dot(v, what) * what
    nu, nv = np.linalg.norm(up), np.linalg.norm(vp)
    if nu < _DEGEN * np.linalg.norm(u) or nv < _DEGEN * np.linalg.norm(v):
        raise DomainError("oriented_angle: vector parallel to the reference axis")
    sin_a = np.dot(what, np.cross(up, vp))
    cos_a = np.dot(up, vp)
    return math.atan2(sin_a, cos_a) % TWO_PI


@dataclass(frozen=True)
class KCoords:
    """The twelve K-variables.

    Z      third component of the total angular momentum C
    C      norm of the total angular momentum
    Theta  projection of M on the direction of x'
    G      norm of the orbital angular momentum M
    R      radial impulse of x'
    L      semi-major-axis action
    zeta   node angle of C in the inertial frame
    g      node angle of x' in the invariable frame
    theta  rotation angle of M about x'
    gbar   perihelion angle
    r      |x'|
    ell    mean anomaly of x on its ellipse
    """

    Z: float
    C: float
    Theta: float
    G: float
    R: float
    L: float
    zeta: float
    g: float
    theta: float
    gbar: float
    r: float
    ell: float


@dataclass(frozen=True)
class PlanarKCoords:
    """Planar K-variables (C, R, L, G, zeta, g, gbar, r, ell)."""

    C: float
    R: float
    L: float
    G: float
    zeta: float
    g: float
    gbar: float
    r: float
    ell: float


@dataclass(frozen=True)
class CartesianState:
    """Impulse-position state (y', y, x', x), each a vector in R^3."""

    yprime: np.ndarray
    y: np.ndarray
    xprime: np.ndarray
    x: np.ndarray


@dataclass(frozen=True)
class Inclinations:
    """Inclination angles of the three frame junctions."""

    i: float
    i1: float
    i2: float


def inclinations(k: KCoords) -> Inclinations:
    """i = acos(Z/C), i1 = acos(Theta/C), i2 = acos(Theta/G)."""
    for num, den, name in (
        (k.Z, k.C, "Z/C"),
        (k.Theta, k.C, "Theta/C"),
        (k.Theta, k.G, "Theta/G"),
    ):
        if abs(num) > den:
            raise DomainError(f"inclination cosine {name} outside [-1, 1]")
    return Inclinations(
        i=math.acos(k.Z / k.C),
        i1=math.acos(k.Theta / k.C),
        i2=math.acos(k.Theta / k.G),
    )


def _check_interior(k: KCoords) -> None:
    if k.C < _DEGEN:
        raise DomainError("total angular momentum C vanishes (node i1 undefined)")
    if k.r <= 0.0:
        raise DomainError("r must be positive")
    if not (0.0 < k.G <= k.L):
        raise DomainError(f"actions must satisfy 0 < G <= L, got G={k.G}, L={k.L}")
    if abs(k.Z) / k.C > 1.0 - _DEGEN:
        raise DomainError("C parallel to k: node i1 = k x C vanishes")
    if abs(k.Theta) / k.C > 1.0 - _DEGEN:
        raise DomainError("x' parallel to C: node i2 = C x x' vanishes")
    if abs(k.Theta) / k.G > 1.0 - _DEGEN:
        raise DomainError("x' parallel to M: node i3 = x' x M vanishes")
    if eccentricity(k.L, k.G) < _DEGEN:
        raise DomainError("circular orbit: perihelion direction undefined")


def _perifocal_xy(L: float, G: float, ell: float, gbar: float, masses: MassParams):
    """In-plane vectors xbar, ybar of the ellipse, in the M-frame."""
    e = eccentricity(L, G)
    a = semi_major_axis(L, masses)
    xi = solve_kepler(e, ell)
    c, s = math.cos(xi), math.sin(xi)
    rho = 1.0 - e * c
    Rg = rot3(gbar - 0.5 * math.pi)
    xbar = a * (Rg @ np.array([c - e, (G / L) * s, 0.0]))
    ybar = (masses.m ** 2 * masses.M / (L * rho)) * (
        Rg @ np.array([-s, (G / L) * c, 0.0])
    )
    return xbar, ybar


def k_to_cartesian(k: KCoords, masses: MassParams) -> CartesianState:
    """The map phi: K-coordinates -> (y', y, x', x)."""
    _check_interior(k)
    inc = inclinations(k)
    R01 = rot3(k.zeta) @ rot1(inc.i)          # inertial -> invariable frame
    R12 = rot3(k.g) @ rot1(inc.i1)            # invariable -> x' frame
    R23 = rot3(k.theta) @ rot1(inc.i2)        # x' frame -> M frame
    R02 = R01 @ R12
    R03 = R02 @ R23

    xbar, ybar = _perifocal_xy(k.L, k.G, k.ell, k.gbar, masses)
    x = R03 @ xbar
    y = R03 @ ybar
    xprime = k.r * (R02 @ _KHAT)
    Cvec = k.C * (R01 @ _KHAT)
    Mvec = k.G * (R03 @ _KHAT)
    Mprime = Cvec - Mvec
    yprime = (k.R / k.r) * xprime + np.cross(Mprime, xprime) / (k.r ** 2)
    return CartesianState(yprime=yprime, y=y, xprime=xprime, x=x)


def k_to_cartesian_planar(
    k: PlanarKCoords, sigma: int, masses: MassParams, incl: float = 0.0
) -> CartesianState:
    """Planar reduction of the map: all vectors in one plane through 0.

    sigma = +1 is the prograde case (M parallel to C), sigma = -1 the
    retrograde one. incl tilts the common plane (0 keeps it horizontal).
    """
    if sigma not in (+1, -1):
        raise DomainError("sigma must be +1 or -1")
    if k.r <= 0.0 or k.C <= 0.0:
        raise DomainError("r and C must be positive")
    if not (0.0 < k.G <= k.L):
        raise DomainError("actions must satisfy 0 < G <= L")
    Rz = rot3(k.zeta) @ rot1(incl) @ rot3(k.g)
    xbar, ybar = _perifocal_xy(k.L, k.G, k.ell, k.gbar, masses)
    # in-plane factors from the planar limit of the spatial chain
    # (i1 = i2 = pi/2 with theta = pi for sigma=+1, theta = 0 for sigma=-1);
    # the reflection for sigma=-1 reverses the orbit's orientation.
    x = Rz @ np.array([-sigma * xbar[0], -xbar[1], 0.0])
    y = Rz @ np.array([-sigma * ybar[0], -ybar[1], 0.0])
    xprime = -k.r * (Rz @ _JHAT)
    yprime = -k.R * (Rz @ _JHAT) + ((k.C - sigma * k.G) / k.r) * (Rz @ _IHAT)
    return CartesianState(yprime=yprime, y=y, xprime=xprime, x=x)


def cartesian_to_k(s: CartesianState, masses: MassParams) -> KCoords:
    """The inverse map, straight from the defining formulae."""
    m, Mc = masses.m, masses.M
    x, y, xprime, yprime = s.x, s.y, s.xprime, s.yprime
    r = np.linalg.norm(xprime)
    rx = np.linalg.norm(x)
    if r < _DEGEN or rx < _DEGEN:
        raise DomainError("x or x' vanishes")

    Mvec = np.cross(x, y)
    Mprime = np.cross(xprime, yprime)
    Cvec = Mvec + Mprime
    G = np.linalg.norm(Mvec)
    C = np.linalg.norm(Cvec)
    if G < _DEGEN or C < _DEGEN:
        raise DomainError("angular momentum vanishes")
    Z = Cvec[2]
    Theta = np.dot(Mvec, xprime) / r
    R = np.dot(yprime, xprime) / r

    # Kepler elements of (y, x)
    energy = np.dot(y, y) / (2.0 * m) - m * Mc / rx
    if energy >= 0.0:
        raise DomainError("Kepler energy of (y, x) is not negative")
    # energy = -m^3 Mc^2 / (2 L^2) and a = L^2/(m^2 Mc)  =>  a = -m*Mc/(2*energy)
    a = -m * Mc / (2.0 * energy)
    L = m * math.sqrt(Mc * a)
    Lvec = np.cross(y, Mvec) - m * m * Mc * x / rx  # eccentricity vector
    ecc = np.linalg.norm(Lvec) / (m * m * Mc)
    if ecc < _DEGEN:
        raise DomainError("circular orbit: perihelion direction undefined")
    P = Lvec / np.linalg.norm(Lvec)

    # nodes
    node1 = np.cross(_KHAT, Cvec)
    node2 = np.cross(Cvec, xprime)
    node3 = np.cross(xprime, Mvec)
    for node, name in ((node1, "i1 = k x C"), (node2, "i2 = C x x'"), (node3, "i3 = x' x M")):
        if np.linalg.norm(node) < _DEGEN:
            raise DomainError(f"node {name} vanishes")

    zeta = oriented_angle(_KHAT, _IHAT, node1)
    g = oriented_angle(Cvec, node1, node2)
    theta = oriented_angle(xprime, node2, node3)
    gbar = oriented_angle(Mvec, node3, np.cross(Mvec, P))

    # eccentric anomaly from the position in the perifocal frame
    Q = np.cross(Mvec / G, P)
    b = a * math.sqrt(max(0.0, 1.0 - ecc * ecc))
    xi = math.atan2(np.dot(x, Q) / b, np.dot(x, P) / a + ecc)
    ell = (xi - ecc * math.sin(xi)) % TWO_PI

    return KCoords(
        Z=float(Z), C=float(C), Theta=float(Theta), G=float(G), R=float(R), L=float(L),
        zeta=zeta, g=g, theta=theta, gbar=gbar, r=float(r), ell=ell,
    )


# ---------------------------------------------------------------------------
# numerical canonicity check
# ---------------------------------------------------------------------------

# conjugate ordering: actions (Z, C, Theta, G, R, L) paired with angles
# (zeta, g, theta, gbar, r, ell)
_FIELDS = ("Z", "C", "Theta", "G", "R", "L", "zeta", "g", "theta", "gbar", "r", "ell")


def _k_from_vector(u: np.ndarray) -> KCoords:
    return KCoords(**{name: float(val) for name, val in zip(_FIELDS, u)})


def k_to_vector(k: KCoords) -> np.ndarray:
    """Pack KCoords into the canonical ordering used by the symplectic test."""
    return np.array([getattr(k, name) for name in _FIELDS])


def _state_to_vector(s: CartesianState) -> np.ndarray:
    return np.concatenate([s.yprime, s.y, s.xprime, s.x])


def symplectic_matrix(n: int = 6) -> np.ndarray:
    """Standard symplectic form for (p_1..p_n, q_1..q_n) ordering."""
    omega = np.zeros((2 * n, 2 * n))
    omega[:n, n:] = -np.eye(n)
    omega[n:, :n] = np.eye(n)
    return omega


def canonicity_residual(k: KCoords, masses: MassParams, fd_step: float = 1e-6) -> float:
    """max-norm of J^T Omega J - Omega for the finite-difference Jacobian J.

    J is the 12x12 central-difference Jacobian of the map phi at k, in the
    canonical ordering (actions first, conjugate angles second).
    """
    _check_interior(k)
    if fd_step <= 0.0:
        raise NumericsError("fd_step must be positive")
    u0 = k_to_vector(k)
    jac = np.empty((12, 12))
    for j in range(12):
        h = fd_step
        up = u0.copy()
        um = u0.copy()
        up[j] += h
        um[j] -= h
        try:
            fp = _state_to_vector(k_to_cartesian(_k_from_vector(up), masses))
            fm = _state_to_vector(k_to_cartesian(_k_from_vector(um), masses))
        except DomainError as exc:
            raise NumericsError(
                f"finite-difference step leaves the coordinate domain: {exc}"
            ) from exc
        jac[:, j] = (fp - fm) / (2.0 * h)
    omega = symplectic_matrix()
    return float(np.max(np.abs(jac.T @ omega @ jac - omega)))

"""Secular (mean-anomaly averaged) Euler Hamiltonian.

The average ``U`` over the inner Keplerian motion of the interaction
term -m*Mprime/|x'-x| depends on the pair (G, gbar) only through the
scalar E0, a property referred to here as renormalizable integrability:
U factors as U = -m*Mprime * f_tilde(r, a, eps, iota), with (eps, iota)
functions of (L, Theta, E0) alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ellipk

from .errors import CollisionError, DomainError, NumericsError
from .kepler import MassParams, eccentricity, semi_major_axis

_COLLISION_GUARD = 1e-8


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls the periodic trapezoid rule used for the averages.

    The node count is doubled (up to ``max_doublings`` times) until two
    successive refinements agree to ``tol``; for analytic periodic
    integrands the convergence is spectral.
    """

    nodes: int = 64
    tol: float = 1e-13
    max_doublings: int = 7

    def __post_init__(self) -> None:
        if self.nodes < 8 or self.nodes % 2:
            raise ValueError("nodes must be an even integer >= 8")
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")


def _refine(value, spec: QuadratureSpec) -> float:
    n = spec.nodes
    prev = value(n)
    for _ in range(spec.max_doublings):
        n *= 2
        cur = value(n)
        if abs(cur - prev) <= spec.tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise NumericsError("periodic quadrature failed to converge")


def average_potential(
    r: float,
    L: float,
    Theta: float,
    G: float,
    gbar: float,
    masses: MassParams,
    q: QuadratureSpec | None = None,
) -> float:
    """U = -(m*Mprime/2pi) * integral over ell of d(ell)/|x'-x|.

    The integral is taken over one inner period at frozen (r, gbar);
    substituting the eccentric anomaly xi (d ell = rho d xi) makes the
    integrand smooth and 2pi-periodic.
    """
    if q is None:
        q = QuadratureSpec()
    if not (0.0 < G <= L):
        raise DomainError(f"actions must satisfy 0 < G <= L, got G={G}, L={L}")
    if abs(Theta) > G:
        raise DomainError("|Theta| must not exceed G")
    if r <= 0.0:
        raise DomainError("r must be positive")
    a = semi_major_axis(L, masses)
    e = eccentricity(L, G)
    wincl = math.sqrt(max(0.0, 1.0 - (Theta / G) ** 2))
    qq = G / L

    def value(n: int) -> float:
        xi = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
        cx, sx = np.cos(xi), np.sin(xi)
        rho = 1.0 - e * cx
        p = (cx - e) * math.cos(gbar) - qq * sx * math.sin(gbar)
        d2 = r * r + 2.0 * r * a * wincl * p + a * a * rho * rho
        if np.min(d2) < _COLLISION_GUARD * r * r:
            raise CollisionError("averaging through a collision with the second centre")
        return float(np.mean(rho / np.sqrt(d2)))

    return -masses.m * masses.Mprime * _refine(value, q)


def f_tilde(
    r: float, a: float, Ecal: float, Ical: float, q: QuadratureSpec | None = None
) -> float:
    """The universal averaging kernel.

    f_tilde = (1/2pi) * integral over w of (1 - Ecal*cos w) /
        sqrt(r^2 + a^2 - 2a(r*Ical*sin w + a*Ecal*cos w) + a^2*Ecal^2*cos^2 w).
    """
    if q is None:
        q = QuadratureSpec()
    if not (0.0 <= Ecal < 1.0):
        raise DomainError("Ecal must lie in [0, 1)")
    if r <= 0.0 or a <= 0.0:
        raise DomainError("r and a must be positive")

    def value(n: int) -> float:
        w = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
        cw, sw = np.cos(w), np.sin(w)
        rad = (
            r * r
            + a * a
            - 2.0 * a * (r * Ical * sw + a * Ecal * cw)
            + a * a * Ecal * Ecal * cw * cw
        )
        if np.min(rad) < _COLLISION_GUARD * r * r:
            raise CollisionError("kernel evaluated through a collision")
        return float(np.mean((1.0 - Ecal * cw) / np.sqrt(rad)))

    return _refine(value, q)


def ei_params(L: float, Theta: float, E0: float) -> tuple[float, float]:
    """The pair (Ecal, Ical) through which the kernel sees the state.

    Ecal = sqrt(L^2 - E0)/L and Ical = sqrt(E0 - Theta^2)/L, defined for
    Theta^2 <= E0 <= L^2.
    """
    if L <= 0.0:
        raise DomainError("L must be positive")
    lo, hi = Theta * Theta, L * L
    if E0 < lo - 1e-12 * hi or E0 > hi * (1.0 + 1e-12):
        raise DomainError(f"E0={E0} outside the admissible band [{lo}, {hi}]")
    Ecal = math.sqrt(max(0.0, L * L - E0)) / L
    Ical = math.sqrt(max(0.0, E0 - Theta * Theta)) / L
    return Ecal, Ical


def circular_kernel(r: float, a: float) -> float:
    """Closed form of the average on circular coplanar orbits.

    average_potential at e = 0, Theta = 0 equals
    (2/pi) * (-m*Mprime/(r + a)) * K(k), with k^2 = 4ra/(r+a)^2 and K
    the complete elliptic integral of the first kind; this returns the
    mass-free factor (2/pi) K(k) / (r + a).
    """
    if r <= 0.0 or a <= 0.0:
        raise DomainError("r and a must be positive")
    if abs(r - a) < 1e-12 * (r + a):
        raise CollisionError("circular kernel diverges at r = a")
    k2 = 4.0 * r * a / (r + a) ** 2
    return 2.0 / math.pi * float(ellipk(k2)) / (r + a)


def poisson_bracket_fd(f, g, point: tuple[float, float], fd_step: float = 1e-6) -> float:
    """{f, g} = df/dgbar dg/dG - df/dG dg/dgbar by central differences.

    ``f`` and ``g`` map (G, gbar) to a float; ``point`` is (G, gbar).
    """
    G, gbar = point
    if fd_step <= 0.0:
        raise NumericsError("fd_step must be positive")
    hG = fd_step * max(1.0, abs(G))
    hg = fd_step * max(1.0, abs(gbar))

    def d_dG(fun):
        return (fun(G + hG, gbar) - fun(G - hG, gbar)) / (2.0 * hG)

    def d_dg(fun):
        return (fun(G, gbar + hg) - fun(G, gbar - hg)) / (2.0 * hg)

    return d_dg(f) * d_dG(g) - d_dG(f) * d_dg(g)

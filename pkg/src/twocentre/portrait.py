"""Planar phase portrait of the leading Euler integral.

With Theta = 0 the level sets of E0 in the (gbar, G) plane are governed
by the normalized function

    Ehat0(gbar, Ghat) = Ghat^2 + delta * sqrt(1 - Ghat^2) * cos(gbar),

delta = r/a being the only parameter.  This module provides the exact
critical-point structure, level-curve branches, separatrices, the
regime classification, the closed-form collision orbit on S0 and the
asymptotic (large-r) action-angle variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

_EDGE = 1e-12


def admissible_range(delta: float) -> tuple[float, float]:
    """Admissible level values [Ehat_min, Ehat_max] for a given delta."""
    if delta <= 0.0:
        raise DomainError("delta must be positive")
    if delta > 2.0:
        return -delta, delta
    return -delta, 1.0 + delta * delta / 4.0


@dataclass(frozen=True)
class PortraitSpec:
    """A (delta, Ehat) pair validated against the admissible range."""

    delta: float
    ehat: float

    def __post_init__(self) -> None:
        lo, hi = admissible_range(self.delta)
        if not (lo - _EDGE <= self.ehat <= hi + _EDGE):
            raise DomainError(
                f"level {self.ehat} outside admissible range [{lo}, {hi}]"
            )


@dataclass(frozen=True)
class RegimeLabel:
    """A case tag from the portrait itemization plus curve identity."""

    tag: str
    curve: str = ""
    note: str = ""


@dataclass(frozen=True)
class CriticalPoint:
    gbar: float
    Ghat: float
    value: float
    kind: str
    note: str = ""


def ehat0(gbar: float, Ghat: float, delta: float) -> float:
    """Ehat0(gbar, Ghat) = Ghat^2 + delta*sqrt(1-Ghat^2)*cos(gbar)."""
    if abs(Ghat) > 1.0 + _EDGE:
        raise DomainError("|Ghat| must not exceed 1")
    g2 = min(Ghat * Ghat, 1.0)
    return g2 + delta * math.sqrt(1.0 - g2) * math.cos(gbar)


def critical_points(delta: float) -> list[CriticalPoint]:
    """Minimum, saddle and maximum of Ehat0 (structure depends on delta)."""
    if delta <= 0.0:
        raise DomainError("delta must be positive")
    pts = [CriticalPoint(math.pi, 0.0, -delta, "min")]
    if delta < 2.0:
        pts.append(CriticalPoint(0.0, 0.0, delta, "saddle"))
        pts.append(
            CriticalPoint(0.0, math.sqrt(1.0 - delta * delta / 4.0),
                          1.0 + delta * delta / 4.0, "max")
        )
    elif delta == 2.0:
        pts.append(
            CriticalPoint(0.0, 0.0, delta, "max",
                          note="degenerate: saddle and maximum merged")
        )
    else:
        pts.append(CriticalPoint(0.0, 0.0, delta, "max"))
    return pts


def g_roots(ehat: float, delta: float) -> tuple[float, float, float, float]:
    """(Gminus^2, Gplus^2, Gmin, Gmax) bracketing a level curve in |Ghat|.

    Gplus/minus^2 = Ehat - delta^2/2 +- delta*sqrt(1 + delta^2/4 - Ehat);
    the physical band is Gmin = sqrt(max(Gminus^2, 0)) up to
    Gmax = sqrt(min(Gplus^2, 1)).
    """
    PortraitSpec(delta, ehat)
    disc = 1.0 + delta * delta / 4.0 - ehat
    if disc < 0.0:
        disc = 0.0
    root = delta * math.sqrt(disc)
    gm2 = ehat - delta * delta / 2.0 - root
    gp2 = ehat - delta * delta / 2.0 + root
    gmin = math.sqrt(max(gm2, 0.0))
    gmax = math.sqrt(max(0.0, min(gp2, 1.0)))
    return gm2, gp2, gmin, gmax


def level_branch(ehat: float, delta: float, Ghat: float) -> tuple[float, float]:
    """The two branch angles (gbar_plus, gbar_minus) of a level at |Ghat|.

    gbar_plus lies in [0, pi]; gbar_minus = -gbar_plus mod 2pi.  At the
    band endpoints the analytic limits are used instead of the raw 0/0
    expression: at Ghat = Gmax the angle is pi for Ehat < 1, pi/2 at
    Ehat = 1 and 0 for Ehat > 1; at Ghat = Gmin = 0 on a sub-saddle
    level it is arccos(Ehat/delta).
    """
    _, _, gmin, gmax = g_roots(ehat, delta)
    aG = abs(Ghat)
    if aG < gmin - _EDGE or aG > gmax + _EDGE:
        raise DomainError(f"|Ghat|={aG} outside the level band [{gmin}, {gmax}]")
    aG = min(max(aG, gmin), gmax)
    one_minus = 1.0 - aG * aG
    if one_minus <= _EDGE:
        # on the S1 horizontal branch Ghat = 1; the limit depends on how
        # Gmax approaches 1 (see the endpoint table)
        gp = math.pi / 2.0 if abs(ehat - 1.0) <= _EDGE else (
            math.pi if ehat < 1.0 else 0.0)
    else:
        arg = (ehat - aG * aG) / (delta * math.sqrt(one_minus))
        if abs(arg) > 1.0 + 1e-9:
            raise DomainError("level equation has no solution at this Ghat")
        gp = math.acos(min(1.0, max(-1.0, arg)))
    gm = (-gp) % (2.0 * math.pi)
    return gp, gm


def level_slope(ehat: float, delta: float, Ghat: float) -> float:
    """d(gbar_plus)/d(Ghat) in closed form.

    The factor (2 - Ehat - Ghat^2) places the unique interior extremum
    of gbar_plus at Ghat0 = sqrt(2 - Ehat) whenever that point falls in
    the band (which requires Ehat >= 1).
    """
    gm2, gp2, gmin, gmax = g_roots(ehat, delta)
    aG = abs(Ghat)
    if not (gmin < aG < gmax):
        raise DomainError("slope defined only in the open band")
    num = (aG * aG - gm2) * (gp2 - aG * aG)
    if num <= 0.0:
        raise DomainError("slope undefined at band endpoint")
    return (aG / math.sqrt(num)) * (2.0 - ehat - aG * aG) / (1.0 - aG * aG)


@dataclass(frozen=True)
class SeparatrixData:
    """Sampled separatrix curves for one delta."""

    delta: float
    s0: np.ndarray | None  # (n, 2) rows (gbar, Ghat), absent for delta >= 2
    s1_horizontal: np.ndarray = field(repr=False, default=None)
    s1_vertical: np.ndarray = field(repr=False, default=None)


def separatrices(delta: float, n_samples: int = 200) -> SeparatrixData:
    """Sample S0 (level through the saddle) and the two S1 branches.

    For delta > 1 the vertical S1 branch only exists on the two
    gbar-neighbourhoods of +-pi/2 where delta^2 cos^2(gbar) <= 1.
    """
    if n_samples < 2:
        raise DomainError("need at least 2 samples")
    if delta <= 0.0:
        raise DomainError("delta must be positive")
    s0 = None
    if delta < 2.0:
        _, _, gmin, gmax = g_roots(delta, delta)
        gs = np.linspace(gmin, gmax, n_samples)
        rows = []
        for G in gs:
            gp, gm = level_branch(delta, delta, G)
            rows.append((gp, G))
            rows.append((gm, G))
            rows.append((gp, -G))
            rows.append((gm, -G))
        s0 = np.array(rows)
    gb = np.linspace(0.0, 2.0 * math.pi, n_samples, endpoint=False)
    horiz = np.concatenate(
        [np.column_stack([gb, np.ones_like(gb)]),
         np.column_stack([gb, -np.ones_like(gb)])]
    )
    mask = delta * delta * np.cos(gb) ** 2 <= 1.0
    gv = gb[mask]
    g1 = np.sqrt(1.0 - delta * delta * np.cos(gv) ** 2)
    vert = np.concatenate(
        [np.column_stack([gv, g1]), np.column_stack([gv, -g1])]
    )
    return SeparatrixData(delta=delta, s0=s0, s1_horizontal=horiz, s1_vertical=vert)


def classify_regime(delta: float, ehat: float) -> RegimeLabel:
    """Map (delta, Ehat) to its case tag in the portrait itemization."""
    lo, hi = admissible_range(delta)
    if not (lo - _EDGE <= ehat <= hi + _EDGE):
        raise DomainError(f"level {ehat} outside admissible range [{lo}, {hi}]")
    d, E = delta, ehat
    tol = _EDGE * max(1.0, abs(hi))

    def close(x, y):
        return abs(x - y) <= tol

    if close(E, lo):
        return RegimeLabel("MIN", note="minimum point P-")
    if close(E, hi):
        if d < 2.0:
            return RegimeLabel("MAX", note="maximum point P+")
        return RegimeLabel("MAX", note="maximum point at the origin")
    if d <= 1.0:
        if close(E, d) and close(E, 1.0):
            return RegimeLabel("S0", curve="S0",
                               note="delta = 1: S0 and S1 merge")
        if close(E, d):
            return RegimeLabel("1_2", curve="S0")
        if close(E, 1.0):
            # the itemization calls this manifold S0, but the level
            # Ehat = 1 passes through Ghat = +-1, which is S1
            return RegimeLabel("1_4", curve="S1",
                               note="labelled S0 in the itemization; "
                                    "the curve is S1")
        if E < d:
            return RegimeLabel("1_1", note="librations around the minimum")
        if E < 1.0:
            return RegimeLabel("1_3", note="rotational band")
        return RegimeLabel("1_5", note="librations around the maximum")
    if d <= 2.0:
        if close(E, 1.0):
            return RegimeLabel("2_2", curve="S1")
        if close(E, d):
            return RegimeLabel("2_4", curve="S0")
        if E < 1.0:
            return RegimeLabel("2_1", note="librations around the minimum")
        if E < d:
            return RegimeLabel("2_3", note="around the saddle level band")
        return RegimeLabel("2_5", note="librations around the maximum")
    if close(E, 1.0):
        return RegimeLabel("3_2", curve="S1")
    if E < 1.0:
        return RegimeLabel("3_1", note="librations around the minimum")
    return RegimeLabel("3_3", note="librations around the maximum")


def collision_orbit(
    delta: float, L: float, t, t0: float = 0.0, branch_sign: int = 1
):
    """Closed-form motion of (G, gbar) on the collisional manifold S0.

    With sigma^2 = delta*(2 - delta) and beta^2 = 2 - delta,

        G(t)   = sigma*L / cosh(sigma*L*(t - t0)),
        gbar(t) = s(t) * arccos[(1 - beta^2/cosh^2) / sqrt(1 - sigma^2/cosh^2)],

    where the branch sign s(t) = branch_sign*sign(t0 - t) flips at t0 so
    that the pair solves Hamilton's equations of E0 smoothly.  Defined
    for delta in (0, 2) only (S0 does not exist otherwise).
    """
    if not (0.0 < delta < 2.0):
        raise DomainError("the collisional manifold requires delta in (0, 2)")
    if L <= 0.0:
        raise DomainError("L must be positive")
    if branch_sign not in (1, -1):
        raise DomainError("branch_sign must be +1 or -1")
    sigma = math.sqrt(delta * (2.0 - delta))
    beta2 = 2.0 - delta
    tt = np.asarray(t, dtype=float)
    ch = np.cosh(sigma * L * (tt - t0))
    G = sigma * L / ch
    with np.errstate(invalid="ignore", divide="ignore"):
        arg = (1.0 - beta2 / ch ** 2) / np.sqrt(1.0 - (sigma / ch) ** 2)
    # delta = 1 gives a removable 0/0 at t = t0 (any gbar is on-level there)
    arg = np.nan_to_num(np.clip(arg, -1.0, 1.0), nan=0.0)
    s = branch_sign * np.where(tt < t0, 1.0, -1.0)
    gbar = s * np.arccos(arg)
    if np.isscalar(t) or tt.ndim == 0:
        return float(G), float(gbar)
    return G, gbar


# ---------------------------------------------------------------------------
# Asymptotic (large-r) action-angle variables
# ---------------------------------------------------------------------------


def aa_action(Lcal: float, Ecal: float) -> float:
    """The action of the leading flow: Gcal = Lcal * Ecal."""
    if Lcal <= 0.0:
        raise DomainError("Lcal must be positive")
    if abs(Ecal) > 1.0:
        raise DomainError("|Ecal| must not exceed 1")
    return Lcal * Ecal


def aa_transform(
    Lcal: float, Gcal: float, lam: float, gamma: float
) -> tuple[float, float, float, float]:
    """Action-angle chart of the leading flow: (L, G, ell, gbar) image.

    L = Lcal, G = sqrt(Lcal^2 - Gcal^2)*cos(gamma); gbar solves
    tan(gbar) = -(Lcal/Gcal)*sqrt(1 - Gcal^2/Lcal^2)*sin(gamma) with
    sign(cos gbar) = sign(Gcal); ell = lam + arg(cos gamma,
    (Lcal/|Gcal|)*sin gamma).
    """
    if Lcal <= 0.0:
        raise DomainError("Lcal must be positive")
    if Gcal == 0.0:
        raise DomainError("Gcal = 0: the perihelion angle is undefined")
    if abs(Gcal) > Lcal:
        raise DomainError("|Gcal| must not exceed Lcal")
    root = math.sqrt(max(0.0, Lcal * Lcal - Gcal * Gcal))
    G = root * math.cos(gamma)
    sgn = 1.0 if Gcal > 0 else -1.0
    tan_g = -(root / Gcal) * math.sin(gamma)
    gbar = math.atan2(sgn * tan_g, sgn) % (2.0 * math.pi)
    ell = (lam + math.atan2((Lcal / abs(Gcal)) * math.sin(gamma),
                            math.cos(gamma))) % (2.0 * math.pi)
    return Lcal, G, ell, gbar


def e0_in_aa(
    Lcal: float, Gcal: float, gamma: float, r: float, m: float, M: float
) -> float:
    """E0 in the asymptotic chart: r*m^2*M*Gcal/Lcal + (Lcal^2-Gcal^2)cos^2(gamma).

    Exact, not only asymptotic: through aa_transform the leading factor
    sqrt(1 - G^2/Lcal^2)*cos(gbar) equals Gcal/Lcal identically.
    """
    return r * m * m * M * Gcal / Lcal + (Lcal * Lcal - Gcal * Gcal) * math.cos(gamma) ** 2

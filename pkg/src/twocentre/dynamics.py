"""Hamiltonian flows in K-coordinates.

Three flows are provided through a common interface:

* ``"two_centre"``: the (possibly spatial) two-centre Hamiltonian
  J = -m^3 M^2/(2 L^2) - m Mprime/sqrt(D2) with the second centre frozen
  at distance r;
* ``"e0"``: the planar secular Hamiltonian
  E0 = G^2 + m^2 M r sqrt(1 - G^2/L^2) cos(gbar);
* ``"three_body"``: the planar three-body Hamiltonian in K-coordinates,
  with the total angular momentum C as a parameter.

All right-hand sides use analytic partial derivatives; the eccentric
anomaly is differentiated implicitly through the Kepler equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, NumericsError
from .kepler import MassParams, solve_kepler

_ECC_GUARD = 1e-9
_BOUNDARY_GUARD = 1e-9


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-12
    abs_tol: float = 1e-12
    max_step: float = math.inf
    t_end: float = 1.0
    sample_dt: float | None = None

    def __post_init__(self) -> None:
        if self.rel_tol <= 0.0 or self.abs_tol <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.t_end <= 0.0:
            raise ValueError("t_end must be positive")


@dataclass(frozen=True)
class ThreeBodyState:
    """Planar three-body state in K-coordinates; C is a constant parameter."""

    R: float
    r: float
    L: float
    ell: float
    G: float
    gbar: float
    C: float

    def __post_init__(self) -> None:
        if self.r <= 0.0:
            raise DomainError("r must be positive")
        if not (0.0 < self.G <= self.L):
            raise DomainError("need 0 < G <= L")


@dataclass
class TrajectoryResult:
    t: np.ndarray
    states: np.ndarray          # one row per sample
    fields: tuple[str, ...]     # column names of ``states``
    diagnostics: dict[str, np.ndarray]
    reason: str                 # "completed" or a guard tag


class _OrbitTerms:
    """Inner-orbit quantities and their partials at one (L, G, ell, gbar).

    Attribute naming: ``X_Y`` is the partial of X with respect to Y.
    The eccentric anomaly xi solves xi - e sin(xi) = ell, whence
    xi_ell = 1/rho and xi_e = sin(xi)/rho with rho = 1 - e cos(xi).
    """

    __slots__ = (
        "e", "xi", "cxi", "sxi", "rho", "q", "p", "a",
        "e_L", "e_G", "xi_L", "xi_G", "xi_ell",
        "rho_L", "rho_G", "rho_ell",
        "p_L", "p_G", "p_ell", "p_g", "a_L",
    )

    def __init__(self, L: float, G: float, ell: float, gbar: float,
                 masses: MassParams):
        e2 = 1.0 - (G / L) ** 2
        if e2 < _ECC_GUARD * _ECC_GUARD:
            raise DomainError("near-circular orbit: eccentricity partials blow up")
        e = math.sqrt(e2)
        xi = solve_kepler(e, ell)
        cxi, sxi = math.cos(xi), math.sin(xi)
        rho = 1.0 - e * cxi
        q = G / L
        cg, sg = math.cos(gbar), math.sin(gbar)
        p = (cxi - e) * cg - q * sxi * sg
        a = L * L / (masses.m ** 2 * masses.M)

        e_L = G * G / (L ** 3 * e)
        e_G = -G / (L * L * e)
        xi_ell = 1.0 / rho
        xi_L = e_L * sxi / rho
        xi_G = e_G * sxi / rho
        rho_L = -e_L * cxi + e * sxi * xi_L
        rho_G = -e_G * cxi + e * sxi * xi_G
        rho_ell = e * sxi / rho
        q_L = -G / (L * L)
        q_G = 1.0 / L

        def p_of(xi_X, e_X, q_X):
            return (-sxi * xi_X - e_X) * cg - (q_X * sxi + q * cxi * xi_X) * sg

        self.e, self.xi, self.cxi, self.sxi = e, xi, cxi, sxi
        self.rho, self.q, self.p, self.a = rho, q, p, a
        self.e_L, self.e_G = e_L, e_G
        self.xi_L, self.xi_G, self.xi_ell = xi_L, xi_G, xi_ell
        self.rho_L, self.rho_G, self.rho_ell = rho_L, rho_G, rho_ell
        self.p_L = p_of(xi_L, e_L, q_L)
        self.p_G = p_of(xi_G, e_G, q_G)
        self.p_ell = -(sxi * cg + q * cxi * sg) / rho
        self.p_g = -(cxi - e) * sg - q * sxi * cg
        self.a_L = 2.0 * a / L


def _d2_terms(o: _OrbitTerms, r: float, Theta: float, G: float):
    """D2 = r^2 + 2 r a w p + a^2 rho^2 and its partials.

    Returns (D2, dict of partials over r, L, G, ell, gbar, Theta); w is
    sqrt(1 - Theta^2/G^2).
    """
    w2 = 1.0 - (Theta / G) ** 2
    if w2 < 0.0:
        raise DomainError("|Theta| must not exceed G")
    w = math.sqrt(w2)
    a, rho, p = o.a, o.rho, o.p
    D2 = r * r + 2.0 * r * a * w * p + a * a * rho * rho
    if D2 <= 0.0:
        raise DomainError("collision: D2 vanished")
    if w > 0.0:
        w_G = Theta * Theta / (G ** 3 * w)
        w_T = -Theta / (G * G * w)
    else:
        w_G = w_T = 0.0
    d = {
        "r": 2.0 * r + 2.0 * a * w * p,
        "L": 2.0 * r * (o.a_L * w * p + a * w * o.p_L)
             + 2.0 * a * o.a_L * rho * rho + 2.0 * a * a * rho * o.rho_L,
        "G": 2.0 * r * a * (w_G * p + w * o.p_G) + 2.0 * a * a * rho * o.rho_G,
        "ell": 2.0 * r * a * w * o.p_ell + 2.0 * a * a * rho * o.rho_ell,
        "gbar": 2.0 * r * a * w * o.p_g,
        "Theta": 2.0 * r * a * w_T * p,
    }
    return D2, d


def two_centre_hamiltonian(
    state: np.ndarray, r: float, masses: MassParams
) -> float:
    """J at a (L, ell, G, gbar, Theta, theta, R, r) two-centre state."""
    L, ell, G, gbar, Theta = state[0], state[1], state[2], state[3], state[4]
    o = _OrbitTerms(L, G, ell, gbar, masses)
    D2, _ = _d2_terms(o, r, Theta, G)
    return (
        -(masses.m ** 3) * masses.M ** 2 / (2.0 * L * L)
        - masses.m * masses.Mprime / math.sqrt(D2)
    )


def _rhs_two_centre(state, masses: MassParams):
    # state: (L, ell, G, gbar, Theta, theta, R, r)
    L, ell, G, gbar, Theta, _theta, _R, r = state
    o = _OrbitTerms(L, G, ell, gbar, masses)
    D2, d = _d2_terms(o, r, Theta, G)
    c = 0.5 * masses.m * masses.Mprime / D2 ** 1.5  # dJ/dX = c * D2_X
    kep = masses.m ** 3 * masses.M ** 2 / L ** 3
    return [
        -c * d["ell"],            # L'    = -dJ/d ell
        kep + c * d["L"],         # ell'  =  dJ/dL
        -c * d["gbar"],           # G'    = -dJ/d gbar
        c * d["G"],               # gbar' =  dJ/dG
        0.0,                      # Theta' (J independent of theta)
        c * d["Theta"],           # theta' = dJ/dTheta
        -c * d["r"],              # R'    = -dJ/dr
        0.0,                      # r'    =  dJ/dR = 0 exactly
    ]


def e0_hamiltonian(state: np.ndarray, r: float, masses: MassParams) -> float:
    """Planar E0 at a (L, ell, G, gbar) state."""
    L, _ell, G, gbar = state
    e = math.sqrt(max(0.0, 1.0 - (G / L) ** 2))
    return G * G + masses.m ** 2 * masses.M * r * e * math.cos(gbar)


def _rhs_e0(state, r, masses: MassParams):
    L, _ell, G, gbar = state
    e2 = 1.0 - (G / L) ** 2
    if e2 < _ECC_GUARD * _ECC_GUARD:
        raise DomainError("near-circular orbit in the E0 flow")
    e = math.sqrt(e2)
    k = masses.m ** 2 * masses.M * r
    e_L = G * G / (L ** 3 * e)
    e_G = -G / (L * L * e)
    return [
        0.0,                                   # L' (E0 independent of ell)
        k * math.cos(gbar) * e_L,              # ell' = dE0/dL
        k * e * math.sin(gbar),                # G'   = -dE0/d gbar
        2.0 * G + k * math.cos(gbar) * e_G,    # gbar' = dE0/dG
    ]


def threebody_hamiltonian(s: ThreeBodyState, masses: MassParams) -> float:
    """H of the planar three-body problem in K-coordinates."""
    parts = threebody_decomposition(s, masses)
    return parts["J"] + parts["K"] + parts["f"]


def threebody_decomposition(s: ThreeBodyState, masses: MassParams) -> dict:
    """The J (two-centre-like) + K (radial) + f (coupling) split of H."""
    o = _OrbitTerms(s.L, s.G, s.ell, s.gbar, masses)
    D2, _ = _d2_terms(o, s.r, 0.0, s.G)
    mP, MP = masses.m, masses.Mprime  # equal reduced masses: m' = m
    J = (
        -(masses.m ** 3) * masses.M ** 2 / (2.0 * s.L * s.L)
        - masses.m * masses.M / math.sqrt(D2)
    )
    K = (
        -mP * MP / s.r
        + s.R * s.R / (2.0 * mP)
        + (s.C - s.G) ** 2 / (2.0 * mP * s.r * s.r)
    )
    A = masses.m ** 2 * masses.M / (s.L * o.rho)
    cg, sg = math.cos(s.gbar), math.sin(s.gbar)
    y1 = A * (-sg * o.sxi + o.q * cg * o.cxi)
    y2 = A * (cg * o.sxi + o.q * sg * o.cxi)
    f = ((s.C - s.G) / s.r * y1 - s.R * y2) / masses.m0
    return {"J": J, "K": K, "f": f, "y1": y1, "y2": y2, "D2": D2}


def _rhs_three_body(state, C, masses: MassParams):
    # state: (R, r, L, ell, G, gbar)
    R, r, L, ell, G, gbar = state
    if r <= 0.0:
        raise DomainError("r must stay positive")
    o = _OrbitTerms(L, G, ell, gbar, masses)
    D2, d = _d2_terms(o, r, 0.0, G)
    m, m0 = masses.m, masses.m0
    mprime = masses.m          # equal reduced masses: m' = m
    Mc, Mp = masses.M, masses.Mprime

    cD = 0.5 * m * Mc / D2 ** 1.5          # d(-mM/sqrt(D2))/dX = cD * D2_X
    cg, sg = math.cos(gbar), math.sin(gbar)
    A = m * m * Mc / (L * o.rho)
    u1 = -sg * o.sxi + o.q * cg * o.cxi
    u2 = cg * o.sxi + o.q * sg * o.cxi
    y1, y2 = A * u1, A * u2

    # partials of y_i = A(L, rho) * u_i(xi, q, gbar)
    q_L, q_G = -G / (L * L), 1.0 / L
    u1_xi = -sg * o.cxi - o.q * cg * o.sxi
    u2_xi = cg * o.cxi - o.q * sg * o.sxi

    def dy(u, u_xi, u_q, xi_X, q_X, rho_X, extra_L=0.0):
        dA = A * (-rho_X / o.rho + extra_L)
        return dA * u + A * (u_xi * xi_X + u_q * q_X)

    y1_L = dy(u1, u1_xi, cg * o.cxi, o.xi_L, q_L, o.rho_L, extra_L=-1.0 / L)
    y1_G = dy(u1, u1_xi, cg * o.cxi, o.xi_G, q_G, o.rho_G)
    y1_ell = dy(u1, u1_xi, cg * o.cxi, o.xi_ell, 0.0, o.rho_ell)
    y1_g = A * (-u2)
    y2_L = dy(u2, u2_xi, sg * o.cxi, o.xi_L, q_L, o.rho_L, extra_L=-1.0 / L)
    y2_G = dy(u2, u2_xi, sg * o.cxi, o.xi_G, q_G, o.rho_G)
    y2_ell = dy(u2, u2_xi, sg * o.cxi, o.xi_ell, 0.0, o.rho_ell)
    y2_g = A * u1

    CmG = C - G
    f_R = -y2 / m0
    f_r = -CmG * y1 / (m0 * r * r)
    f_L = (CmG / r * y1_L - R * y2_L) / m0
    f_G = (-y1 / r + CmG / r * y1_G - R * y2_G) / m0
    f_ell = (CmG / r * y1_ell - R * y2_ell) / m0
    f_g = (CmG / r * y1_g - R * y2_g) / m0

    H_R = R / mprime + f_R
    H_r = (cD * d["r"] + mprime * Mp / (r * r)
           - CmG * CmG / (mprime * r ** 3) + f_r)
    H_L = m ** 3 * Mc ** 2 / L ** 3 + cD * d["L"] + f_L
    H_ell = cD * d["ell"] + f_ell
    H_G = cD * d["G"] - CmG / (mprime * r * r) + f_G
    H_g = cD * d["gbar"] + f_g

    return [-H_r, H_R, -H_ell, H_L, -H_g, H_G]


def hamiltonian_rhs(kind: str, state, masses: MassParams, *, r: float = None,
                    C: float = None):
    """Time derivatives of ``state`` under the chosen Hamiltonian.

    ``kind`` is "two_centre" (state (L, ell, G, gbar, Theta, theta, R, r)),
    "e0" (state (L, ell, G, gbar), frozen centre distance ``r``) or
    "three_body" (state (R, r, L, ell, G, gbar), parameter ``C``).
    """
    if kind == "two_centre":
        return _rhs_two_centre(state, masses)
    if kind == "e0":
        if r is None:
            raise ValueError("the e0 flow needs the centre distance r")
        return _rhs_e0(state, r, masses)
    if kind == "three_body":
        if C is None:
            raise ValueError("the three-body flow needs the parameter C")
        return _rhs_three_body(state, C, masses)
    raise ValueError(f"unknown Hamiltonian kind {kind!r}")


_FIELDS = {
    "two_centre": ("L", "ell", "G", "gbar", "Theta", "theta", "R", "r"),
    "e0": ("L", "ell", "G", "gbar"),
    "three_body": ("R", "r", "L", "ell", "G", "gbar"),
}


def _guard_events(kind: str):
    """Terminal events flagging the domain boundaries."""
    idx = {name: i for i, name in enumerate(_FIELDS[kind])}

    def ecc(t, y):
        L, G = y[idx["L"]], y[idx["G"]]
        return 1.0 - (G / L) ** 2 - _ECC_GUARD ** 2
    ecc.terminal = True

    def gamma_low(t, y):
        return y[idx["G"]] - _BOUNDARY_GUARD * y[idx["L"]]
    gamma_low.terminal = True

    events = [(ecc, "eccentricity_guard"), (gamma_low, "gamma_guard")]
    if "r" in idx and kind != "two_centre":
        def radial(t, y):
            return y[idx["r"]]
        radial.terminal = True
        events.append((radial, "radial_collision"))
    return events


def integrate(
    kind: str,
    initial_state,
    masses: MassParams,
    cfg: IntegratorConfig,
    *,
    r: float = None,
    C: float = None,
) -> TrajectoryResult:
    """Integrate one trajectory with an adaptive 8th-order Runge-Kutta pair.

    Per-sample diagnostics: the Hamiltonian value (key ``"H"``); for
    two-centre runs also the Euler integral ``"E"`` and ``"Theta"``.
    Early termination on a domain guard is reported through ``reason``.
    """
    y0 = np.asarray(initial_state, dtype=float)
    fields = _FIELDS[kind]
    if y0.size != len(fields):
        raise ValueError(f"{kind} state must have components {fields}")

    def rhs(t, y):
        return hamiltonian_rhs(kind, y, masses, r=r, C=C)

    events = _guard_events(kind)
    t_eval = None
    if cfg.sample_dt is not None:
        t_eval = np.arange(0.0, cfg.t_end * (1.0 + 1e-12), cfg.sample_dt)
    sol = solve_ivp(
        rhs, (0.0, cfg.t_end), y0, method="DOP853",
        rtol=cfg.rel_tol, atol=cfg.abs_tol, max_step=cfg.max_step,
        t_eval=t_eval, events=[e for e, _ in events], dense_output=False,
    )
    if sol.status == -1:
        raise NumericsError(f"integration failed: {sol.message}")
    reason = "completed"
    if sol.status == 1:
        for (ev, tag), hits in zip(events, sol.t_events):
            if hits.size:
                reason = tag
                break

    diagnostics = {"H": _hamiltonian_series(kind, sol.y, masses, r=r, C=C)}
    if kind == "two_centre":
        from .hamiltonians import e_in_k as _e_in_k  # noqa: F401  (documented link)
        E = np.empty(sol.y.shape[1])
        for j in range(sol.y.shape[1]):
            L, ell, G, gbar, Theta = sol.y[0, j], sol.y[1, j], sol.y[2, j], sol.y[3, j], sol.y[4, j]
            rr = sol.y[7, j]
            E[j] = _euler_integral_2c(L, ell, G, gbar, Theta, rr, masses)
        diagnostics["E"] = E
        diagnostics["Theta"] = sol.y[4].copy()
    return TrajectoryResult(
        t=sol.t, states=sol.y.T.copy(), fields=fields,
        diagnostics=diagnostics, reason=reason,
    )


def _euler_integral_2c(L, ell, G, gbar, Theta, r, masses):
    o = _OrbitTerms(L, G, ell, gbar, masses)
    D2, _ = _d2_terms(o, r, Theta, G)
    w = math.sqrt(max(0.0, 1.0 - (Theta / G) ** 2))
    e0 = G * G + masses.m ** 2 * masses.M * r * w * o.e * math.cos(gbar)
    e1 = masses.m ** 2 * masses.Mprime * r * (r + o.a * w * o.p) / math.sqrt(D2)
    return e0 + e1


def _hamiltonian_series(kind, Y, masses, *, r=None, C=None):
    out = np.empty(Y.shape[1])
    for j in range(Y.shape[1]):
        y = Y[:, j]
        if kind == "two_centre":
            out[j] = two_centre_hamiltonian(y, y[7], masses)
        elif kind == "e0":
            out[j] = e0_hamiltonian(y, r, masses)
        else:
            s = ThreeBodyState(R=y[0], r=y[1], L=y[2], ell=y[3],
                               G=y[4], gbar=y[5], C=C)
            out[j] = threebody_hamiltonian(s, masses)
    return out


# ---------------------------------------------------------------------------
# The three-body experiment
# ---------------------------------------------------------------------------

EXPERIMENT_INITIAL = ThreeBodyState(
    R=7.071067e-5,
    r=100.0,
    L=2.236067e-2,
    ell=0.751906,
    G=1.596860e-2,
    gbar=math.pi,
    C=7.087036,
)
EXPERIMENT_MASSES = MassParams(m=0.5, M=2.0, Mprime=2.0, m0=1.0)


@dataclass
class ExperimentSummary:
    a: float
    delta: float
    equilibrium_r: float
    energy_drift: float
    r_min: float
    r_mean: float
    r_max: float
    gbar_min: float
    gbar_max: float
    reason: str


def run_paper_experiment(
    cfg: IntegratorConfig | None = None,
    initial: ThreeBodyState | None = None,
    masses: MassParams | None = None,
) -> tuple[TrajectoryResult, ExperimentSummary]:
    """Integrate the equal-mass three-body configuration of the experiment.

    The defaults put the inner pair on a tight (a = 10^-3) orbit with
    delta = r/a = 10^5 and the outer distance near the radial
    equilibrium C^2/(m'^2 Mprime).
    """
    if cfg is None:
        cfg = IntegratorConfig(rel_tol=1e-13, abs_tol=1e-13, t_end=0.5,
                               sample_dt=2e-4)
    if initial is None:
        initial = EXPERIMENT_INITIAL
    if masses is None:
        masses = EXPERIMENT_MASSES
    y0 = [initial.R, initial.r, initial.L, initial.ell, initial.G, initial.gbar]
    res = integrate("three_body", y0, masses, cfg, C=initial.C)
    a = initial.L ** 2 / (masses.m ** 2 * masses.M)
    H = res.diagnostics["H"]
    drift = float(np.max(np.abs(H - H[0])) / abs(H[0]))
    rs = res.states[:, res.fields.index("r")]
    gb = np.mod(res.states[:, res.fields.index("gbar")], 2.0 * math.pi)
    summary = ExperimentSummary(
        a=a,
        delta=initial.r / a,
        equilibrium_r=initial.C ** 2 / (masses.m ** 2 * masses.Mprime),
        energy_drift=drift,
        r_min=float(rs.min()), r_mean=float(rs.mean()), r_max=float(rs.max()),
        gbar_min=float(gb.min()), gbar_max=float(gb.max()),
        reason=res.reason,
    )
    return res, summary

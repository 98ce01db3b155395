"""Self-check suites bundling the library's numerical invariants.

Each suite draws reproducible random states, measures a residual and
compares it with a fixed threshold; the CLI ``verify`` command reports
the results as JSON.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from . import dynamics, hamiltonians, secular
from .kepler import MassParams, semi_major_axis
from .kmap import CartesianState, canonicity_residual, cartesian_to_k

_DEFAULT_MASSES = MassParams(m=1.3, M=2.1, Mprime=0.8)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    residual: float
    threshold: float
    points: int
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)


def _random_k_interior(rng, masses):
    """A random spatial Cartesian state whose K-image is interior."""
    while True:
        s = CartesianState(
            yprime=rng.normal(size=3),
            y=rng.normal(size=3),
            xprime=rng.normal(size=3) * 3.0,
            x=rng.normal(size=3) * 2.0,
        )
        try:
            k = cartesian_to_k(s, masses)
        except Exception:
            continue
        return s, k


def suite_canonicity(points: int = 100, seed: int = 0,
                     threshold: float = 1e-5,
                     masses: MassParams = _DEFAULT_MASSES) -> SuiteResult:
    """Worst symplectic residual of the K-map over random states."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        _, k = _random_k_interior(rng, masses)
        worst = max(worst, canonicity_residual(k, masses))
    return SuiteResult("canonicity", worst < threshold, worst, threshold,
                       points, seed)


def suite_euler_integral(points: int = 100, seed: int = 1,
                         threshold: float = 1e-10,
                         masses: MassParams = _DEFAULT_MASSES) -> SuiteResult:
    """Pairwise agreement of the four Euler-integral evaluation routes."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    done = 0
    while done < points:
        s, k = _random_k_interior(rng, masses)
        try:
            ec = hamiltonians.euler_integral_cartesian(s, masses)
            routes = (
                hamiltonians.euler_integral_via_symmetric(s, masses),
                hamiltonians.euler_integral_via_elliptic(s, masses),
                hamiltonians.e_in_k(k, masses),
            )
        except Exception:
            continue
        scale = max(1.0, abs(ec))
        worst = max(worst, max(abs(v - ec) / scale for v in routes))
        done += 1
    return SuiteResult("euler_integral", worst < threshold, worst, threshold,
                       points, seed)


def suite_renormalizable(points: int = 50, seed: int = 2,
                         threshold: float = 1e-9,
                         masses: MassParams = _DEFAULT_MASSES) -> SuiteResult:
    """|m*Mprime*f_tilde + U| at random admissible secular points."""
    rng = np.random.default_rng(seed)
    q = secular.QuadratureSpec(nodes=64, tol=1e-13, max_doublings=8)
    worst = 0.0
    done = 0
    while done < points:
        L = rng.uniform(0.5, 2.0)
        G = rng.uniform(0.05, 1.0) * L
        Theta = rng.uniform(-1.0, 1.0) * G
        gbar = rng.uniform(0.0, 2.0 * math.pi)
        a = semi_major_axis(L, masses)
        r = rng.uniform(0.1, 10.0) * a
        e0 = hamiltonians.e0_in_k(L, G, Theta, r, gbar, masses)
        if not (Theta * Theta <= e0 <= L * L):
            continue
        try:
            U = secular.average_potential(r, L, Theta, G, gbar, masses, q)
            Ecal, Ical = secular.ei_params(L, Theta, e0)
            F = secular.f_tilde(r, a, Ecal, Ical, q)
        except Exception:
            continue
        worst = max(worst, abs(masses.m * masses.Mprime * F + U))
        done += 1
    return SuiteResult("renormalizable", worst < threshold, worst, threshold,
                       points, seed)


def suite_brackets(points: int = 20, seed: int = 3,
                   threshold: float = 1e-6,
                   masses: MassParams = _DEFAULT_MASSES) -> SuiteResult:
    """|{U, E0}| in the (G, gbar) plane at random planar points."""
    rng = np.random.default_rng(seed)
    q = secular.QuadratureSpec(nodes=64, tol=1e-13, max_doublings=8)
    worst = 0.0
    done = 0
    while done < points:
        L = rng.uniform(0.5, 2.0)
        G = rng.uniform(0.2, 0.9) * L
        gbar = rng.uniform(0.0, 2.0 * math.pi)
        a = semi_major_axis(L, masses)
        r = rng.uniform(2.0, 10.0) * a

        def U(Gv, gv):
            return secular.average_potential(r, L, 0.0, Gv, gv, masses, q)

        def E0(Gv, gv):
            return hamiltonians.e0_in_k(L, Gv, 0.0, r, gv, masses)

        try:
            b = secular.poisson_bracket_fd(U, E0, (G, gbar), fd_step=1e-6)
        except Exception:
            continue
        worst = max(worst, abs(b))
        done += 1
    return SuiteResult("poisson_brackets", worst < threshold, worst, threshold,
                       points, seed)


def suite_conservation(periods: int = 10, seed: int = 4,
                       threshold: float = 1e-8,
                       masses: MassParams = _DEFAULT_MASSES) -> SuiteResult:
    """Relative drift of J, E and Theta along the two-centre flow."""
    rng = np.random.default_rng(seed)
    L = rng.uniform(0.8, 1.2)
    G = rng.uniform(0.5, 0.9) * L
    Theta = rng.uniform(-0.8, 0.8) * G
    r = rng.uniform(2.0, 5.0)
    period = 2.0 * math.pi * L ** 3 / (masses.m ** 3 * masses.M ** 2)
    cfg = dynamics.IntegratorConfig(rel_tol=1e-12, abs_tol=1e-12,
                                    t_end=periods * period,
                                    sample_dt=period / 20.0)
    y0 = [L, rng.uniform(0, 2 * math.pi), G, rng.uniform(0, 2 * math.pi),
          Theta, rng.uniform(0, 2 * math.pi), 0.05, r]
    res = dynamics.integrate("two_centre", y0, masses, cfg)
    worst = 0.0
    for key in ("H", "E", "Theta"):
        series = res.diagnostics[key]
        scale = max(1.0, abs(series[0]))
        worst = max(worst, float(np.max(np.abs(series - series[0])) / scale))
    return SuiteResult("conservation", worst < threshold, worst, threshold,
                       periods, seed)


ALL_SUITES = {
    "canonicity": suite_canonicity,
    "euler": suite_euler_integral,
    "renorm": suite_renormalizable,
    "brackets": suite_brackets,
    "conservation": suite_conservation,
}


def run_suites(names=None, points: int | None = None, seed: int | None = None):
    """Run the requested suites (all by default) and return their results."""
    results = []
    for name, fn in ALL_SUITES.items():
        if names and name not in names:
            continue
        kwargs = {}
        if points is not None and name != "conservation":
            kwargs["points"] = points
        if seed is not None:
            kwargs["seed"] = seed
        results.append(fn(**kwargs))
    return results

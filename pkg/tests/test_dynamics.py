import math

import numpy as np
import pytest

from twocentre.dynamics import (
    EXPERIMENT_INITIAL,
    EXPERIMENT_MASSES,
    IntegratorConfig,
    ThreeBodyState,
    e0_hamiltonian,
    hamiltonian_rhs,
    integrate,
    run_paper_experiment,
    threebody_decomposition,
    threebody_hamiltonian,
    two_centre_hamiltonian,
)
from twocentre.errors import DomainError
from twocentre.kepler import MassParams
from twocentre.portrait import collision_orbit, level_branch

MASSES = MassParams(m=1.3, M=2.1, Mprime=0.8)


def _fd_grad(fun, x, h=1e-7):
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (fun(xp) - fun(xm)) / (2.0 * h)
    return g


def test_two_centre_rhs_matches_fd_gradient():
    state = np.array([1.1, 0.9, 0.7, 1.3, 0.25, 0.4, 0.0, 9.0])

    def H(s):
        return two_centre_hamiltonian(s, s[7], MASSES)

    g = _fd_grad(H, state)
    rhs = hamiltonian_rhs("two_centre", state, MASSES)
    # canonical pairs (L, ell), (G, gbar), (Theta, theta), (R, r)
    expect = [-g[1], g[0], -g[3], g[2], -g[5], g[4], -g[7], g[6]]
    assert np.allclose(rhs, expect, rtol=1e-6, atol=1e-7)
    assert rhs[4] == 0.0  # Theta' vanishes identically
    assert rhs[7] == 0.0  # r' vanishes identically


def test_two_centre_keplerian_limit():
    state = np.array([1.1, 0.9, 0.7, 1.3, 0.25, 0.4, 0.0, 9.0])
    free = MassParams(m=1.3, M=2.1, Mprime=0.0)
    rhs = np.asarray(hamiltonian_rhs("two_centre", state, free))
    mean_motion = free.m ** 3 * free.M ** 2 / state[0] ** 3
    assert rhs[1] == pytest.approx(mean_motion, rel=1e-15)
    others = np.delete(rhs, 1)
    assert np.all(others == 0.0)


def test_e0_rhs_matches_fd_gradient():
    r = 5.0
    state = np.array([1.2, 0.3, 0.8, 2.1])

    def H(s):
        return e0_hamiltonian(s, r, MASSES)

    g = _fd_grad(H, state)
    rhs = hamiltonian_rhs("e0", state, MASSES, r=r)
    expect = [-g[1], g[0], -g[3], g[2]]
    assert np.allclose(rhs, expect, rtol=1e-6, atol=1e-7)
    assert rhs[0] == 0.0  # L is a first integral of the planar flow


def test_three_body_rhs_matches_fd_gradient():
    C = 3.0
    state = np.array([0.05, 7.0, 1.1, 0.9, 0.7, 1.3])

    def H(s):
        tb = ThreeBodyState(R=s[0], r=s[1], L=s[2], ell=s[3],
                            G=s[4], gbar=s[5], C=C)
        return threebody_hamiltonian(tb, MASSES)

    g = _fd_grad(H, state)
    rhs = hamiltonian_rhs("three_body", state, MASSES, C=C)
    expect = [-g[1], g[0], -g[3], g[2], -g[5], g[4]]
    assert np.allclose(rhs, expect, rtol=1e-6, atol=1e-7)


def test_decomposition_sums_to_hamiltonian():
    s = ThreeBodyState(R=0.05, r=7.0, L=1.1, ell=0.9, G=0.7, gbar=1.3, C=3.0)
    parts = threebody_decomposition(s, MASSES)
    total = parts["J"] + parts["K"] + parts["f"]
    assert threebody_hamiltonian(s, MASSES) == pytest.approx(total, rel=1e-15)
    fterm = ((s.C - s.G) / s.r * parts["y1"] - s.R * parts["y2"]) / MASSES.m0
    assert parts["f"] == pytest.approx(fterm, rel=1e-14)


def test_radial_equilibrium_of_k_part():
    C, G = 3.0, 0.4
    r_eq = (C - G) ** 2 / (MASSES.m ** 2 * MASSES.Mprime)

    def K(r):
        s = ThreeBodyState(R=0.0, r=r, L=1.1, ell=0.9, G=G, gbar=1.3, C=C)
        return threebody_decomposition(s, MASSES)["K"]

    h = 1e-6 * r_eq
    dK = (K(r_eq + h) - K(r_eq - h)) / (2.0 * h)
    assert abs(dK) < 1e-10


def test_two_centre_conservation_over_ten_periods():
    masses = MASSES
    L = 1.0
    period = 2.0 * math.pi * L ** 3 / (masses.m ** 3 * masses.M ** 2)
    state = [L, 0.9, 0.6, 1.1, 0.3, 0.4, 0.0, 8.0]
    cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-12,
                           t_end=10.0 * period, sample_dt=period / 20.0)
    res = integrate("two_centre", state, masses, cfg)
    assert res.reason == "completed"
    for key in ("H", "E", "Theta"):
        series = res.diagnostics[key]
        scale = max(1.0, abs(series[0]))
        assert np.max(np.abs(series - series[0])) / scale < 1e-8
    # r and Theta are carried along unchanged to machine precision
    assert np.all(res.states[:, res.fields.index("r")] == 8.0)
    assert np.all(res.states[:, res.fields.index("Theta")] == 0.3)


def test_e0_flow_follows_collision_orbit():
    masses = MASSES
    delta, L = 0.5, 1.2
    r = delta * L ** 2 / (masses.m ** 2 * masses.M)
    sigma = math.sqrt(delta * (2.0 - delta))
    t0 = 3.0 / (sigma * L)
    G0, gb0 = collision_orbit(delta, L, 0.0, t0=t0)
    cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-12,
                           t_end=2.0 * t0, sample_dt=t0 / 25.0)
    res = integrate("e0", [L, 0.0, G0, gb0], masses, cfg, r=r)
    assert res.reason == "completed"
    Gc, gbc = collision_orbit(delta, L, res.t, t0=t0)
    G = res.states[:, res.fields.index("G")]
    gb = res.states[:, res.fields.index("gbar")]
    assert np.max(np.abs(G - Gc)) < 1e-6
    mism = np.hypot(np.cos(gb) - np.cos(gbc), np.sin(gb) - np.sin(gbc))
    assert np.max(mism) < 1e-5


def test_gamma_guard_terminates_rotational_orbit():
    masses = MASSES
    delta, L, ehat = 0.5, 1.0, 0.2  # sub-saddle level: the orbit crosses G = 0
    r = delta * L ** 2 / (masses.m ** 2 * masses.M)
    G0 = 0.3 * L
    gb0, _ = level_branch(ehat, delta, G0 / L)
    cfg = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-10, t_end=50.0)
    res = integrate("e0", [L, 0.0, G0, gb0], masses, cfg, r=r)
    assert res.reason == "gamma_guard"
    assert res.t[-1] < 50.0


def test_state_validation():
    with pytest.raises(DomainError):
        ThreeBodyState(R=0.0, r=-1.0, L=1.0, ell=0.0, G=0.5, gbar=0.0, C=1.0)
    with pytest.raises(DomainError):
        ThreeBodyState(R=0.0, r=1.0, L=-1.0, ell=0.0, G=0.5, gbar=0.0, C=1.0)
    with pytest.raises(ValueError):
        hamiltonian_rhs("nope", [0.0], MASSES)
    with pytest.raises(ValueError):
        hamiltonian_rhs("e0", [1.0, 0.0, 0.5, 0.0], MASSES)  # r missing
    with pytest.raises(ValueError):
        integrate("e0", [1.0, 0.0, 0.5], MASSES,
                  IntegratorConfig(t_end=1.0), r=1.0)


def test_experiment_setup_and_short_run():
    a = EXPERIMENT_INITIAL.L ** 2 / (EXPERIMENT_MASSES.m ** 2 *
                                     EXPERIMENT_MASSES.M)
    assert a == pytest.approx(1e-3, rel=1e-5)
    assert EXPERIMENT_INITIAL.r / a == pytest.approx(1e5, rel=1e-5)
    cfg = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-11, t_end=0.004,
                           sample_dt=1e-3)
    res, summary = run_paper_experiment(cfg=cfg)
    assert summary.reason == "completed"
    assert summary.equilibrium_r == pytest.approx(100.452159, abs=1e-5)
    assert summary.energy_drift < 1e-7
    assert math.pi / 2 < summary.gbar_min <= summary.gbar_max < 3 * math.pi / 2
    assert abs(summary.r_mean - 100.0) < 1.0

import math

import numpy as np
import pytest

from twocentre.errors import DomainError
from twocentre.portrait import (
    PortraitSpec,
    aa_action,
    aa_transform,
    admissible_range,
    classify_regime,
    collision_orbit,
    critical_points,
    e0_in_aa,
    ehat0,
    g_roots,
    level_branch,
    level_slope,
    separatrices,
)


def test_ehat0_special_values():
    assert ehat0(0.3, 1.0, 0.7) == pytest.approx(1.0, abs=1e-15)
    assert ehat0(math.pi, 0.0, 0.7) == pytest.approx(-0.7, abs=1e-15)
    assert ehat0(0.0, math.sqrt(1 - 0.25), 1.0) == pytest.approx(1.25,
                                                                 abs=1e-14)


def test_symmetry_delta_to_minus_delta():
    rng = np.random.default_rng(40)
    for _ in range(50):
        g = rng.uniform(0, 2 * math.pi)
        G = rng.uniform(-1, 1)
        d = rng.uniform(0.1, 3)
        assert ehat0(g, G, d) == pytest.approx(ehat0(math.pi - g, G, -d),
                                               rel=1e-13, abs=1e-13)


@pytest.mark.parametrize("delta", [0.5, 1.0, 1.5])
def test_critical_points_subcritical(delta):
    pts = {p.kind: p for p in critical_points(delta)}
    assert pts["min"].value == -delta
    assert pts["saddle"].value == delta
    assert pts["max"].value == pytest.approx(1 + delta ** 2 / 4, abs=1e-14)


def test_critical_points_supercritical():
    pts = {p.kind: p for p in critical_points(3.0)}
    assert set(pts) == {"min", "max"}
    assert pts["max"].value == 3.0
    assert pts["max"].Ghat == 0.0


def test_critical_points_degenerate():
    pts = critical_points(2.0)
    assert any("merged" in p.note for p in pts)


def test_admissible_range():
    assert admissible_range(1.0) == (-1.0, 1.25)
    assert admissible_range(3.0) == (-3.0, 3.0)
    with pytest.raises(DomainError):
        PortraitSpec(1.0, 2.0)


def test_g_roots_limits():
    # Ehat -> delta: Gmax^2 -> delta*(2-delta)
    for d in (0.5, 1.0, 1.5):
        _, _, _, gmax = g_roots(d + 1e-9, d)
        assert gmax ** 2 == pytest.approx(d * (2 - d), abs=1e-8)
        gm2, _, _, _ = g_roots(1.0 - 1e-9, d)
        assert gm2 == pytest.approx(1 - d * d, abs=1e-8)
    # at the maximum level both roots coincide at 1 - delta^2/4
    gm2, gp2, _, _ = g_roots(1 + 0.25, 1.0)
    assert gm2 == pytest.approx(0.75, abs=1e-12)
    assert gp2 == pytest.approx(0.75, abs=1e-12)


def test_level_branch_reproduces_level():
    rng = np.random.default_rng(41)
    for _ in range(200):
        d = rng.uniform(0.1, 3.5)
        lo, hi = admissible_range(d)
        E = rng.uniform(lo, hi)
        _, _, gmin, gmax = g_roots(E, d)
        if gmax <= gmin:
            continue
        G = rng.uniform(gmin, gmax)
        gp, gm = level_branch(E, d, G)
        assert abs(ehat0(gp, G, d) - E) < 1e-12
        assert abs(ehat0(gm, G, d) - E) < 1e-12
        assert gm == pytest.approx((-gp) % (2 * math.pi), abs=1e-14)


def test_level_branch_endpoint_limits():
    # sub-saddle level at Ghat = 0 starts at arccos(E/delta)
    gp, _ = level_branch(0.25, 0.5, 0.0)
    assert gp == pytest.approx(math.acos(0.5), rel=1e-12)
    # Ehat < 1 at Ghat = Gmax ends at pi
    _, _, _, gmax = g_roots(0.9, 0.5)
    gp, _ = level_branch(0.9, 0.5, gmax)
    assert gp == pytest.approx(math.pi, abs=1e-6)
    # delta=1, E=0, G=0 passes through pi/2
    gp, _ = level_branch(0.0, 1.0, 0.0)
    assert gp == pytest.approx(math.pi / 2, rel=1e-12)


def test_level_slope_matches_fd_and_extremum():
    d, E = 0.8, 1.1
    _, _, gmin, gmax = g_roots(E, d)
    for G in np.linspace(gmin + 0.05 * (gmax - gmin),
                         gmax - 0.05 * (gmax - gmin), 7):
        h = 1e-6
        fd = (level_branch(E, d, G + h)[0] - level_branch(E, d, G - h)[0]) / (2 * h)
        assert level_slope(E, d, G) == pytest.approx(fd, rel=1e-5, abs=1e-6)
    G0 = math.sqrt(2 - E)
    if gmin < G0 < gmax:
        assert level_slope(E, d, G0) == pytest.approx(0.0, abs=1e-12)


def test_monotonicity_below_s1():
    d, E = 0.5, 0.9
    _, _, gmin, gmax = g_roots(E, d)
    Gs = np.linspace(gmin, gmax, 50)
    gs = [level_branch(E, d, G)[0] for G in Gs]
    assert all(b >= a - 1e-12 for a, b in zip(gs, gs[1:]))


def test_separatrices_structure():
    sep = separatrices(0.5, 100)
    assert sep.s0 is not None
    # vertical S1 at gbar = 0 has Ghat = sqrt(1 - delta^2)
    g1 = math.sqrt(1 - 0.25)
    row = sep.s1_vertical[np.argmin(np.abs(sep.s1_vertical[:, 0]))]
    assert row[1] == pytest.approx(g1, abs=1e-12)
    # every S0 sample is on the saddle level
    for g, G in sep.s0:
        assert abs(ehat0(g, G, 0.5) - 0.5) < 1e-10
    # supercritical: no S0, vertical branch avoids gbar = 0
    sep3 = separatrices(3.0, 100)
    assert sep3.s0 is None
    assert np.min(np.abs(np.cos(sep3.s1_vertical[:, 0]))) <= 1 / 3.0 + 1e-12


def test_classification_table():
    assert classify_regime(0.5, 0.9).tag == "1_3"
    assert classify_regime(1.5, 1.2).tag == "2_3"
    assert classify_regime(3.0, 2.0).tag == "3_3"
    assert classify_regime(0.5, 0.0).tag == "1_1"
    assert classify_regime(0.5, 0.5).curve == "S0"
    lab = classify_regime(0.5, 1.0)
    assert lab.curve == "S1" and lab.note  # flagged inconsistency
    assert classify_regime(0.5, -0.5).tag == "MIN"
    assert classify_regime(0.5, 1.0625).tag == "MAX"
    with pytest.raises(DomainError):
        classify_regime(2.5, 5.0)


@pytest.mark.parametrize("delta", [0.5, 1.0, 1.5])
def test_collision_orbit_on_level_and_asymptotics(delta):
    L = 1.3
    sigma = math.sqrt(delta * (2 - delta))
    ts = np.linspace(-5 / (sigma * L), 5 / (sigma * L), 1001)
    G, gb = collision_orbit(delta, L, ts)
    lev = (G / L) ** 2 + delta * np.sqrt(1 - (G / L) ** 2) * np.cos(gb)
    assert np.max(np.abs(lev - delta)) < 1e-10
    # t -> +-inf: approach the saddle (G, gbar) -> (0, 0)
    Ginf, gbinf = collision_orbit(delta, L, 60.0 / (sigma * L))
    assert abs(Ginf) < 1e-12 and abs(gbinf) < 1e-4


def test_collision_orbit_midpoint_value():
    G, gb = collision_orbit(0.5, 1.0, 0.0)
    assert G == pytest.approx(math.sqrt(0.75), rel=1e-14)
    # accuracy limited by arccos conditioning at -1
    assert abs(gb) == pytest.approx(math.pi, abs=1e-7)


def test_collision_orbit_rejected_outside_range():
    with pytest.raises(DomainError):
        collision_orbit(2.0, 1.0, 0.0)
    with pytest.raises(DomainError):
        collision_orbit(2.5, 1.0, 0.0)


def test_aa_transform_identity():
    L = 1.7
    for Ecal in (0.3, -0.3, 0.9):
        Gc = aa_action(L, Ecal)
        for gamma in np.linspace(0, 2 * math.pi, 17):
            _, G, ell, gbar = aa_transform(L, Gc, 0.4, gamma)
            lev = math.sqrt(1 - (G / L) ** 2) * math.cos(gbar)
            assert lev == pytest.approx(Gc / L, abs=1e-12)


def test_aa_transform_gamma_zero():
    L, Gc = 1.0, 0.6
    _, G, _, gbar = aa_transform(L, Gc, 0.0, 0.0)
    assert G == pytest.approx(math.sqrt(1 - 0.36), rel=1e-14)
    assert gbar == pytest.approx(0.0, abs=1e-14)
    _, _, _, gbar = aa_transform(L, -Gc, 0.0, 0.0)
    assert gbar == pytest.approx(math.pi, abs=1e-12)


def test_aa_boundary_and_errors():
    L = 1.0
    _, G, _, _ = aa_transform(L, L, 0.0, 1.0)
    assert G == 0.0
    with pytest.raises(DomainError):
        aa_transform(L, 0.0, 0.0, 0.0)
    with pytest.raises(DomainError):
        aa_action(L, 1.5)


def test_e0_in_aa_matches_e0_in_k():
    from twocentre.hamiltonians import e0_in_k
    from twocentre.kepler import MassParams
    masses = MassParams(m=1.3, M=2.1, Mprime=0.8)
    L, r = 1.2, 7.0
    for Ecal in (0.4, -0.4):
        Gc = aa_action(L, Ecal)
        for gamma in np.linspace(0.1, 2 * math.pi, 9):
            _, G, _, gbar = aa_transform(L, Gc, 0.0, gamma)
            if not 0 < G <= L:
                continue
            direct = e0_in_k(L, G, 0.0, r, gbar, masses)
            viaaa = e0_in_aa(L, Gc, gamma, r, masses.m, masses.M)
            assert viaaa == pytest.approx(direct, rel=1e-10)

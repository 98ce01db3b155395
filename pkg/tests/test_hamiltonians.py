import math

import numpy as np
import pytest

from twocentre.errors import CollisionError, DomainError
from twocentre.hamiltonians import (
    e0_in_k,
    e2_value,
    e_in_k,
    eccentricity_vector,
    euler_integral_cartesian,
    euler_integral_elliptic,
    euler_integral_symmetric,
    euler_integral_via_elliptic,
    euler_integral_via_symmetric,
    j_in_k,
    kepler_energy_cartesian,
    two_centre_energy_cartesian,
)
from twocentre.kepler import MassParams
from twocentre.kmap import CartesianState, cartesian_to_k

MASSES = MassParams(m=1.3, M=2.1, Mprime=0.8)


def _states(rng, n):
    out = []
    while len(out) < n:
        s = CartesianState(
            yprime=rng.normal(size=3),
            y=rng.normal(size=3),
            xprime=rng.normal(size=3) * 3.0,
            x=rng.normal(size=3) * 2.0,
        )
        try:
            k = cartesian_to_k(s, MASSES)
        except DomainError:
            continue
        out.append((s, k))
    return out


def test_eccentricity_vector_length():
    rng = np.random.default_rng(20)
    for s, k in _states(rng, 10):
        Lvec = eccentricity_vector(s, MASSES)
        e = math.sqrt(1.0 - (k.G / k.L) ** 2)
        assert np.linalg.norm(Lvec) == pytest.approx(
            MASSES.m ** 2 * MASSES.M * e, rel=1e-10)


def test_cross_formula_agreement():
    rng = np.random.default_rng(21)
    for s, k in _states(rng, 40):
        ec = euler_integral_cartesian(s, MASSES)
        scale = max(1.0, abs(ec))
        assert abs(euler_integral_via_symmetric(s, MASSES) - ec) / scale < 1e-10
        assert abs(euler_integral_via_elliptic(s, MASSES) - ec) / scale < 1e-10
        assert abs(e_in_k(k, MASSES) - ec) / scale < 1e-10


def test_j_in_k_matches_cartesian():
    rng = np.random.default_rng(22)
    for s, k in _states(rng, 20):
        jc = two_centre_energy_cartesian(s, MASSES)
        assert j_in_k(k, MASSES) == pytest.approx(jc, rel=1e-10)


def test_symmetric_merging_centres_limit():
    # v0 = 0: E reduces to the squared angular momentum of the particle
    rng = np.random.default_rng(23)
    u, v = rng.normal(size=3), rng.normal(size=3)
    E = euler_integral_symmetric(u, v, np.zeros(3), 2.0, 0.7)
    M = np.cross(v, u)
    assert E == pytest.approx(float(np.dot(M, M)), rel=1e-13)


def test_mprime_zero_reduces_to_e0():
    # without the second centre's mass the integral is |M|^2 - x'.L
    rng = np.random.default_rng(24)
    kep = MassParams(m=1.3, M=2.1, Mprime=0.0)
    for _ in range(5):
        s = CartesianState(
            yprime=rng.normal(size=3), y=rng.normal(size=3),
            xprime=rng.normal(size=3) * 3.0, x=rng.normal(size=3) * 2.0)
        M = np.cross(s.x, s.y)
        Lvec = eccentricity_vector(s, kep)
        expect = float(np.dot(M, M) - np.dot(s.xprime, Lvec))
        assert euler_integral_cartesian(s, kep) == pytest.approx(expect,
                                                                 rel=1e-13)


def test_e0_in_k_structure():
    # at gbar = pi/2 the perturbing term vanishes and E0 = G^2
    assert e0_in_k(1.2, 0.8, 0.3, 5.0, math.pi / 2, MASSES) == pytest.approx(
        0.64, rel=1e-13)
    # coefficient of the cos-term is m^2 * M * r * w * e
    L, G, Theta, r = 1.2, 0.8, 0.3, 5.0
    w = math.sqrt(1 - (Theta / G) ** 2)
    e = math.sqrt(1 - (G / L) ** 2)
    expect = G * G + MASSES.m ** 2 * MASSES.M * r * w * e
    assert e0_in_k(L, G, Theta, r, 0.0, MASSES) == pytest.approx(expect,
                                                                 rel=1e-14)


def test_e2_is_an_integral_combination():
    rng = np.random.default_rng(25)
    for s, _ in _states(rng, 5):
        j = two_centre_energy_cartesian(s, MASSES)
        expect = MASSES.m * 0.5 * float(np.dot(s.xprime, s.xprime)) * j
        assert e2_value(s, MASSES) == pytest.approx(expect, rel=1e-13)


def test_kepler_energy_negative_for_bound_orbit():
    rng = np.random.default_rng(26)
    for s, _ in _states(rng, 5):
        assert kepler_energy_cartesian(s, MASSES) < 0.0


def test_collision_guards():
    s = CartesianState(
        yprime=np.zeros(3), y=np.array([0.0, 1.0, 0.0]),
        xprime=np.array([1.0, 0.0, 0.0]), x=np.array([1.0, 0.0, 0.0]))
    with pytest.raises(CollisionError):
        two_centre_energy_cartesian(s, MASSES)
    with pytest.raises(CollisionError):
        euler_integral_cartesian(s, MASSES)


def test_elliptic_rejects_degenerate_geometry():
    u = np.array([0.0, 1.0, 0.0])
    v = np.array([2.0, 0.0, 0.0])
    v0 = np.array([1.0, 0.0, 0.0])  # collinear: beta = +-1
    with pytest.raises(DomainError):
        euler_integral_elliptic(u, v, v0, 2.0, 0.7)

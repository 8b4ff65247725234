import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from lagpme import oracle
from lagpme.oracle import Barenblatt


@pytest.mark.parametrize("alpha", [2.0, 3.0, 4.0, 8.0])
def test_1d_centre_value_at_unit_time(alpha):
    assert Barenblatt(alpha).value(0.0, 1.0) == 1.0


def test_1d_alpha4_sample():
    assert Barenblatt(4.0).k == pytest.approx(0.2)
    assert Barenblatt(4.0).value(2.0, 1.0) == pytest.approx(0.7 ** (1 / 3), rel=1e-14)


def test_radii():
    assert Barenblatt(4.0).radius(1.0) == pytest.approx(math.sqrt(40 / 3), rel=1e-14)
    assert Barenblatt(4.0, 2, 0.1).radius(1.0) == pytest.approx(1.460593, abs=1e-6)


@pytest.mark.parametrize("B", [Barenblatt(3.0), Barenblatt(4.0, 2, 0.1), Barenblatt(2.0, 2, 0.1)])
@pytest.mark.parametrize("t", [0.5, 1.0, 3.0])
def test_zero_just_outside_support(B, t):
    R = B.radius(t) * (1 + 1e-9)
    x = R if B.dim == 1 else np.array([R / math.sqrt(2), R / math.sqrt(2)])
    assert B.value(x, t) == 0.0
    inside = 0.999 * x
    assert B.value(inside, t) > 0.0


def test_rejects_bad_parameters():
    with pytest.raises(ValueError):
        Barenblatt(1.0)
    with pytest.raises(ValueError):
        Barenblatt(3.0, 3)
    with pytest.raises(ValueError):
        Barenblatt(3.0).value(0.0, 0.0)
    with pytest.raises(ValueError):
        Barenblatt(3.0, 1, 0.5)


def _quad_mass(B, t):
    R = B.radius(t)
    if B.dim == 1:
        return integrate.quad(lambda x: float(B.value(x, t)), -R, R, epsabs=0, epsrel=1e-12)[0]
    return 2 * math.pi * integrate.quad(lambda r: r * float(B.value(np.array([r, 0.0]), t)), 0, R,
                                        epsabs=0, epsrel=1e-12)[0]


@pytest.mark.parametrize("B", [Barenblatt(3.0), Barenblatt(4.0), Barenblatt(2.0, 2, 0.1), Barenblatt(4.0, 2, 0.1)])
def test_mass_is_conserved(B):
    masses = [_quad_mass(B, t) for t in (1.0, 2.0, 10.0)]
    assert max(masses) - min(masses) <= 1e-8 * masses[0]
    assert B.mass() == pytest.approx(masses[0], rel=1e-8)


@given(
    x=st.floats(-5, 5),
    t=st.floats(0.1, 10),
    lam=st.floats(0.2, 5),
    alpha=st.sampled_from([2.0, 3.0, 4.0, 6.0]),
    dim=st.sampled_from([1, 2]),
)
def test_self_similar_scaling(x, t, lam, alpha, dim):
    # B(lam^(k/d) x, lam t) = lam^(-k) B(x, t)
    B = Barenblatt(alpha, dim, 1.0 if dim == 1 else 0.1)
    p = x if dim == 1 else np.array([x, 0.5 * x])
    lhs = B.value(lam ** (B.k / dim) * p, lam * t)
    rhs = lam ** (-B.k) * B.value(p, t)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-300)


def test_waiting_time_theory():
    assert oracle.waiting_time_theory(0.0, 4.0) == pytest.approx(0.1)
    assert oracle.waiting_time_theory(0.25, 4.0) == pytest.approx(1 / 7.5)
    assert oracle.waiting_time_theory(0.5, 4.0) is None
    assert oracle.waiting_time_theory(-0.1, 4.0) is None


@given(theta=st.floats(0, 0.25), alpha=st.floats(1.5, 10), d=st.floats(0.01, 1))
def test_waiting_time_monotone(theta, alpha, d):
    w = oracle.waiting_time_theory
    assert w(theta, alpha + d) < w(theta, alpha)
    if theta + d / 4 <= 0.25:
        assert w(theta + d / 4, alpha) > w(theta, alpha)


def test_initial_data_examples():
    rho = oracle.sine_power(0.0, 4.0)
    assert rho(np.array([-np.pi / 2]))[0] == pytest.approx(0.75 ** (1 / 3), rel=1e-14)
    assert rho(np.array([0.5]))[0] == 0.0 and rho(np.array([-4.0]))[0] == 0.0
    assert oracle.cosine_bump_2d()(np.array([[0.0, 0.0]]))[0] == 1.0
    assert oracle.cosine_bump_2d()(np.array([[1.0, 0.5]]))[0] == 0.0
    expect = 1 + math.exp(-14.4) + 0.001
    assert oracle.two_peaks()(np.array([[0.3, 0.3]]))[0] == pytest.approx(expect, rel=1e-14)


def test_sine_power_inverts_pressure_relation():
    theta, alpha = 0.2, 5.0
    X = np.linspace(-np.pi, 0, 17)
    rho = oracle.sine_power(theta, alpha)(X)
    s2 = np.sin(X) ** 2
    assert np.allclose(alpha / (alpha - 1) * rho ** (alpha - 1), (1 - theta) * s2 + theta * s2 ** 2, atol=1e-14)


def test_donut_support_matches_distance():
    rng = np.random.default_rng(3)
    p = rng.uniform(-1.2, 1.2, (4000, 2))
    rho = oracle.donut(3.0)(p)
    d = oracle.donut_distance(p)
    inside = d < -1e-3
    outside = d > 1e-3
    assert np.all(rho[inside] > 0) and np.all(rho[outside] == 0)
    # the open quarter x > 0, y > 0 between the caps is empty
    assert oracle.donut(3.0)(np.array([[0.53, 0.53]]))[0] == 0.0


def test_initial_datum_dispatch():
    f = oracle.initial_datum("barenblatt", alpha=4.0)
    assert f(np.array([2.0]))[0] == pytest.approx(0.7 ** (1 / 3))
    g = oracle.initial_datum("barenblatt", alpha=4.0, dim=2, C0=0.1, t0=1.0)
    assert g(np.array([[0.0, 0.0]]))[0] == pytest.approx(0.1 ** (1 / 3))
    assert set(oracle.DATA) == {"barenblatt", "sine-power", "cosine-bump-2d", "donut", "two-peaks"}
    with pytest.raises(ValueError, match="unknown initial datum"):
        oracle.initial_datum("plateau")

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperscatter.errors import PoleError
from hyperscatter.geometry import sphere_grid
from hyperscatter.modes import (
    JacobiParams,
    helmholtz_psi,
    jacobi_psi,
    jacobi_residual,
    mode_flux,
    radial_solution,
    rellich_dichotomy,
    spherical_harmonics,
)
from oracle_values import ORACLE


def test_psi_large_rho_modulus():
    p = JacobiParams(0.5, -0.5, 2.0)
    for rho in (15.0, 25.0):
        assert abs(jacobi_psi(p, rho)) * math.sinh(rho) == pytest.approx(0.5, rel=1e-10)


def test_psi_n3_closed_form():
    # for n = 3 the series sums to e^{i mu rho} / (2 sinh rho)
    rho = np.array([1.0, 3.0])
    v = helmholtz_psi(3, 1.0, rho)
    assert np.allclose(v, np.exp(1j * rho) / (2 * np.sinh(rho)), rtol=1e-13)


def test_psi_oracle_n5():
    assert helmholtz_psi(5, 1.0, 2.0) == pytest.approx(ORACLE["psi_n5_mu1_rho2"], rel=1e-13)


def test_jacobi_equation_residual():
    assert abs(jacobi_residual(JacobiParams(0.5, -0.5, 2.0), 3.0)) <= 1e-8
    assert abs(jacobi_residual(JacobiParams(1.5, -0.5, 1.0), 2.0)) <= 1e-8


@settings(max_examples=25, deadline=None)
@given(st.floats(1.0, 8.0), st.floats(0.2, 3.0), st.sampled_from([0.5, 1.0, 1.5]))
def test_psi_conjugation(rho, lam, alpha):
    a = jacobi_psi(JacobiParams(alpha, -0.5, lam), rho)
    b = jacobi_psi(JacobiParams(alpha, -0.5, -lam), rho)
    assert b == pytest.approx(a.conjugate(), rel=1e-13)


def test_excluded_lambda():
    with pytest.raises(PoleError):
        JacobiParams(0.5, -0.5, -1j)


def test_radial_solution_closed_form():
    f = lambda r: cmath.exp(1j * r) / math.sinh(r)
    df = lambda r: f(r) * (1j - 1 / math.tanh(r))
    sol = radial_solution(3, 1.0, 0, (1.0, 6.0), (f(1.0), df(1.0)))
    for r in (2.0, 4.0, 6.0):
        assert sol(r) == pytest.approx(f(r), rel=1e-8)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_radial_solution_matches_psi(n):
    rho0, h = 4.0, 1e-5
    p = helmholtz_psi(n, 1.0, np.array([rho0 - h, rho0, rho0 + h]))
    sol = radial_solution(n, 1.0, 0, (rho0, 20.0), (p[1], (p[2] - p[0]) / (2 * h)))
    for r in (10.0, 20.0):
        assert sol(r) == pytest.approx(helmholtz_psi(n, 1.0, r), rel=1e-7)


def test_wronskian_l2():
    n = 3
    s1 = radial_solution(n, 1.0, 2, (1.0, 12.0), (1.0, 0.0))
    s2 = radial_solution(n, 1.0, 2, (1.0, 12.0), (0.0, 1.0))
    rho = np.linspace(1.0, 12.0, 12)
    W = s1(rho) * s2.derivative(rho) - s2(rho) * s1.derivative(rho)
    # Abel: W sinh^{n-1} is constant and nonzero
    scaled = W * np.sinh(rho) ** (n - 1)
    assert np.all(np.abs(W) > 0)
    assert np.allclose(scaled, scaled[0], rtol=1e-7)


def test_dichotomy_zero():
    r = rellich_dichotomy(3, 1.0, 0, 0)
    assert r.is_zero
    assert np.all(r.window_max == 0)


def test_dichotomy_pure_mode_level():
    r = rellich_dichotomy(3, 1.0, 1, 0)
    assert not r.is_zero
    assert np.allclose(r.window_max, 0.5, rtol=1e-6)


def test_dichotomy_cancellation_case():
    r = rellich_dichotomy(3, 1.0, 1, -1)
    assert not r.is_zero
    assert r.window_max.min() > r.threshold


@pytest.mark.parametrize("n", [3, 4, 5])
def test_dichotomy_grid(n):
    vals = [0, 1, -1, 1j, -1j]
    for c1 in vals:
        for c2 in vals:
            r = rellich_dichotomy(n, 1.0, c1, c2)
            assert r.is_zero == (c1 == 0 and c2 == 0)


def test_y00():
    assert spherical_harmonics(0, 0, np.array([0.0, 0.6, 0.8])) == pytest.approx(1 / math.sqrt(4 * math.pi))


def test_harmonic_gram_matrix():
    sph = sphere_grid(3, 16)
    Y = np.array([spherical_harmonics(l, m, sph.nodes) for l in range(9) for m in range(-l, l + 1)])
    G = (Y * sph.weights) @ Y.T
    assert np.max(np.abs(G - np.eye(len(Y)))) < 1e-12


def test_addition_theorem():
    d = np.array([0.36, -0.48, 0.8])
    for l in range(6):
        s = sum(spherical_harmonics(l, m, d) ** 2 for m in range(-l, l + 1))
        assert s == pytest.approx((2 * l + 1) / (4 * math.pi), rel=1e-13)


def test_mode_flux_forms_agree():
    a, b = mode_flux(0.3 - 0.1j, 2.5, 3)
    assert a == pytest.approx(b, rel=1e-13)

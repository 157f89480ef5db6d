import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperscatter.calculus import (
    BumpFunction,
    Composed,
    CoshPolynomial,
    HelgasonWave,
    RealPart,
    fd_convergence_order,
    fundamental_solution_test,
    green_identity_check,
    laplace_beltrami,
    laplace_beltrami_radial,
)
from hyperscatter.errors import DomainError
from hyperscatter.modes import eigen_check
from oracle_values import ORACLE


def test_constant_field_has_zero_laplacian():
    one = CoshPolynomial((1.0,))
    x = np.array([[0.1, 0.2, -0.3], [0.5, 0.0, 0.4]])
    assert np.allclose(laplace_beltrami(one, x), 0.0, atol=1e-10)


def test_cosh_rho_laplacian():
    f = CoshPolynomial((0.0, 1.0))
    x = np.array([[0.3, -0.2, 0.1], [0.0, 0.7, 0.0]])
    rho = 2 * np.arctanh(np.linalg.norm(x, axis=1))
    exact = 3 * np.cosh(rho)
    assert np.allclose(f.laplacian(x), exact, rtol=1e-13)
    assert np.allclose(laplace_beltrami(f, x, 1e-3), exact, rtol=1e-5)
    assert laplace_beltrami_radial(np.cosh, 1.2, 3) == pytest.approx(3 * math.cosh(1.2), rel=1e-6)


def test_laplacian_stencil_order():
    f = CoshPolynomial((0.5, 0.0, 1.0))
    x = np.array([[0.2, 0.3, -0.1]])
    exact = f.laplacian(x)[0]
    errs = [abs(laplace_beltrami(f, x, h)[0] - exact) for h in (4e-2, 2e-2, 1e-2)]
    assert np.all(np.abs(fd_convergence_order(errs) - 2.0) < 0.2)


def test_stencil_guard_near_boundary():
    f = CoshPolynomial((1.0,))
    with pytest.raises(DomainError):
        laplace_beltrami(f, np.array([[0.9999999, 0.0, 0.0]]), h=10.0)


def test_eigenfunction_lambda_squared():
    res = eigen_check(2.0, (1.0, 0.0, 0.0), [[0.2, -0.1, 0.3], [-0.4, 0.2, 0.1]])
    assert np.all(np.abs(np.array(res["orders"]) - 2.0) < 0.2)
    assert res["errors_lambda_squared"][-1] < 1e-3
    # the linear-in-lambda eigenvalue misses by a fixed amount
    assert min(res["errors_lambda_linear"]) > 0.1


def test_helgason_wave_eigen_relation():
    w = HelgasonWave(2.0, (0.0, 1.0, 0.0))
    x = np.array([[0.1, 0.2, 0.3]])
    assert w.eigenvalue == pytest.approx(2.0)
    assert np.allclose(-w.laplacian(x), w.eigenvalue * w(x), rtol=1e-13)


@pytest.mark.parametrize("R", [0.5, 1.0, 2.0])
def test_green_identity_self_pair(R):
    u = CoshPolynomial((1.0, 0.0, 1.0))
    d1, _ = green_identity_check(u, u, R)
    assert d1 < 1e-14


def test_green_identity_cosh_pairs():
    d = green_identity_check(CoshPolynomial((1.0, 0.0, 1.0)), CoshPolynomial((0.0, 1.0)), 1.0)
    assert max(d) <= 1e-8


def test_green_identity_wave_and_bump():
    w = RealPart(HelgasonWave(2.0, (1.0, 0.0, 0.0)))
    b = BumpFunction(np.zeros(3), 0.8)
    assert max(green_identity_check(w, b, 1.0, breaks=(0.8,))) <= 1e-6


def test_bump_mass_oracle():
    assert BumpFunction(np.zeros(3), 0.8).mass() == pytest.approx(ORACLE["bump_mass_n3_r0.8"], rel=1e-13)


def test_bump_laplacian_against_stencil():
    b = BumpFunction(np.array([0.1, 0.0, 0.2]), 0.9)
    x = np.array([[0.2, 0.1, 0.1], [0.0, -0.2, 0.3]])
    assert np.allclose(laplace_beltrami(b, x, 1e-3), b.laplacian(x), rtol=1e-5, atol=1e-6)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-0.35, 0.35), min_size=3, max_size=3))
def test_bump_gradient_against_differences(p):
    b = BumpFunction(np.array([0.1, -0.1, 0.0]), 1.2)
    x = np.array(p)
    g = b.grad(x)
    h = 1e-6
    fd = np.array([(b(x + h * e) - b(x - h * e)) / (2 * h) for e in np.eye(3)])
    assert np.allclose(g, fd, rtol=1e-6, atol=1e-8)


def test_bump_support():
    b = BumpFunction(np.zeros(3), 0.5)
    assert b(np.array([0.9, 0.0, 0.0])) == 0.0
    assert b(np.zeros(3)) == 1.0
    with pytest.raises(DomainError):
        BumpFunction(np.zeros(3), 0.0)


def test_composed_field():
    c = Composed(CoshPolynomial((0.0, 1.0)), np.array([0.3, 0.0, 0.0]))
    assert c(np.array([0.3, 0.0, 0.0])) == pytest.approx(1.0, rel=1e-14)


def test_fundamental_solution_outside_support():
    phi = BumpFunction(np.zeros(3), 0.5)
    assert fundamental_solution_test(1.0, "outgoing", phi, np.array([0.8, 0.0, 0.0])) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("branch", ["outgoing", "ingoing"])
@pytest.mark.parametrize("x0", [(0.0, 0.0, 0.0), (0.4, 0.0, 0.0)])
def test_fundamental_solution(branch, x0):
    phi = BumpFunction(np.zeros(3), 1.0)
    assert fundamental_solution_test(1.0, branch, phi, np.array(x0)) <= 1e-4


def test_fd_convergence_order_helper():
    assert np.allclose(fd_convergence_order([4.0, 1.0, 0.25]), [2.0, 2.0])

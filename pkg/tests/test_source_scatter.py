import math

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from hyperscatter.calculus import BumpFunction, fd_convergence_order
from hyperscatter.geometry import pairwise_distance, sphere_grid, to_ball
from hyperscatter.kernels import closed_form_green_3d
from hyperscatter.source_scatter import (
    CompactField,
    KernelField,
    SourceSolution,
    far_field,
    far_field_prefactor,
    helmholtz_residual,
    radiation_check_field,
    solve_source,
)
from oracle_values import ORACLE


def gaussian(center, width):
    c = np.asarray(center, dtype=float)
    return lambda x: np.exp(-(pairwise_distance(x, c) / width) ** 2)


@pytest.fixture(scope="module")
def sph12():
    return sphere_grid(3, 12)


@pytest.fixture(scope="module")
def bump_solution(sph12):
    b = BumpFunction(np.array([0.2, 0.1, 0.0]), 0.8)
    f = CompactField.from_function(b, 1.0, 12, sph12)
    return b, f, SourceSolution(f, 1.0)


def test_zero_source_gives_zero_field(sph12):
    f = CompactField.zeros(1.0, 6, sph12)
    pts = np.array([[0.1, 0.2, 0.3], [0.9, 0.0, 0.0]])
    assert np.all(solve_source(f, 1.0, eval_points=pts) == 0)


def test_mollified_point_source(sph12):
    bm = BumpFunction(np.zeros(3), 0.05)
    m = bm.mass()
    f = CompactField.from_function(lambda x: bm(x) / m, 0.05, 12, sph12)
    u = SourceSolution(f, 1.0).polar([3.0], [[0.0, 0.0, 1.0]])[0]
    ref = closed_form_green_3d(3.0, -1j)
    assert abs(u / ref - 1) <= 0.01


def test_linearity(sph12):
    rng = np.random.default_rng(7)
    f = CompactField.from_function(gaussian(rng.uniform(-0.2, 0.2, 3), 0.3), 1.5, 10, sph12)
    g = CompactField.from_function(gaussian(rng.uniform(-0.2, 0.2, 3), 0.4), 1.5, 10, sph12)
    a, b = 0.7 - 0.2j, -1.3
    pts = to_ball(np.array([0.5, 2.0, 4.0]), np.array([[1.0, 0, 0], [0, 0.6, 0.8], [0, 0, -1.0]]))
    lhs = solve_source(f * a + g * b, 1.0, eval_points=pts)
    rhs = a * solve_source(f, 1.0, eval_points=pts) + b * solve_source(g, 1.0, eval_points=pts)
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=0)


def test_far_field_centered_source_is_isotropic():
    b = BumpFunction(np.zeros(3), 0.8)
    f = CompactField.from_function(b, 0.8, 24, sphere_grid(3, 24))
    ff = far_field(f, 1.0, sphere_grid(3, 4))
    assert np.ptp(np.abs(ff.amplitudes)) < 1e-10 * np.abs(ff.amplitudes).max()
    assert ff.amplitudes[0] == pytest.approx(ORACLE["far_field_bump_n3_mu1_r0.8"], rel=1e-7)


def test_far_field_rotation_equivariance():
    rot = Rotation.from_euler("zyx", [0.3, -0.7, 1.1]).as_matrix()
    c = np.array([0.15, 0.05, -0.1])
    sph = sphere_grid(3, 32)
    f = CompactField.from_function(gaussian(c, 0.3), 2.5, 40, sph)
    fr = CompactField.from_function(gaussian(rot @ c, 0.3), 2.5, 40, sph)
    dirs = sphere_grid(3, 3).nodes
    a = far_field(f, 1.0, dirs).amplitudes
    b = far_field(fr, 1.0, dirs @ rot.T).amplitudes
    assert np.max(np.abs(a - b)) <= 1e-10 * np.max(np.abs(a))


def test_ingoing_far_field_is_conjugate(sph12):
    b = BumpFunction(np.array([0.2, 0.1, 0.0]), 0.8)
    f = CompactField.from_function(b, 1.0, 12, sph12)
    dirs = sph12.nodes[:5]
    out = far_field(f, 1.0, dirs, "outgoing").amplitudes
    inn = far_field(f, 1.0, dirs, "ingoing").amplitudes
    assert np.allclose(inn, out.conj(), rtol=1e-14)


def test_far_field_matching_bounded(bump_solution, sph12):
    _, f, sol = bump_solution
    dirs = sph12.nodes[::17]
    ff = far_field(f, 1.0, dirs)
    scaled = []
    for R in (8.0, 10.0, 12.0):
        u = sol.polar(np.full(len(dirs), R), dirs)
        scaled.append(np.max(np.abs(u - far_field_prefactor(R, 1.0, 3) * ff.amplitudes)) * math.sinh(R) ** 2)
    scaled = np.array(scaled)
    assert np.all(scaled < 1.0)
    assert np.ptp(scaled) < 0.05 * scaled.max()


def test_pde_off_support_second_order(bump_solution):
    b, _, sol = bump_solution
    x = np.array([[0.75, 0.2, 0.1], [-0.6, -0.5, 0.2]])
    assert np.all(b(x) == 0)
    errs = [np.max(np.abs(helmholtz_residual(sol, x, 1.0, h))) for h in (4e-2, 2e-2, 1e-2)]
    assert np.all(np.abs(fd_convergence_order(errs) - 2.0) < 0.3)


def test_pde_inside_support_second_order(bump_solution):
    b, _, sol = bump_solution
    x = np.array([[0.25, 0.1, 0.05]])
    errs = [abs(helmholtz_residual(sol, x, 1.0, h, source=b)[0]) for h in (4e-2, 2e-2, 1e-2)]
    assert np.all(np.abs(fd_convergence_order(errs) - 2.0) < 0.3)


def test_radiation_check_kernel_field():
    sph = sphere_grid(3, 8)
    good = radiation_check_field(KernelField(1.0, [0.3, 0.0, 0.0]), 1.0, [8.0, 12.0, 16.0], sph)
    assert good.passes
    bad = radiation_check_field(KernelField(1.0, [0.3, 0.0, 0.0], "ingoing"), 1.0, [8.0, 12.0, 16.0], sph)
    assert not bad.passes
    assert np.min(bad.scaled_residual) > 10 * np.max(good.scaled_residual)


def test_radiation_check_source_solution(bump_solution, sph12):
    _, _, sol = bump_solution
    rep = radiation_check_field(sol, 1.0, [8.0, 12.0, 16.0], sphere_grid(3, 6))
    assert rep.passes
    assert np.ptp(rep.decay_scaled_residual) < 0.1 * rep.decay_scaled_residual.max()


def test_compact_field_algebra(sph12):
    f = CompactField.from_function(gaussian(np.zeros(3), 0.3), 1.5, 8, sph12)
    assert (f - f).integrate() == 0
    assert (f * 2.0).integrate() == pytest.approx(2 * f.integrate())
    assert f.conj().integrate() == pytest.approx(np.conj(f.integrate()))

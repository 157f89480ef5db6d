"""Laplace-Beltrami operator, Green identities and the fundamental-solution test.

Test fields expose ``__call__`` (value), ``grad`` (Euclidean gradient in ball
coordinates) and ``laplacian`` (Delta_H), all vectorized over a trailing
coordinate axis.  With the conformal factor lam = 2/(1-|x|^2),

    Delta_H f = lam^{-2} Delta_E f + (n-2) lam^{-1} x . grad_E f,
    (grad u, grad v)_g = lam^{-2} grad_E u . grad_E v,
    d/drho = lam^{-1} xhat . grad_E.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import DomainError
from .geometry import (
    as_coords,
    sphere_area,
    mobius,
    pairwise_distance,
    sphere_grid,
    surface_weight,
    to_ball,
    translated_ball_grid,
)

__all__ = [
    "BumpFunction",
    "CoshPolynomial",
    "HelgasonWave",
    "RealPart",
    "Composed",
    "laplace_beltrami",
    "laplace_beltrami_radial",
    "fd_convergence_order",
    "green_identity_check",
    "fundamental_solution_test",
]


def _sq(x):
    return np.sum(x * x, axis=-1)


@dataclass(frozen=True)
class CoshPolynomial:
    """f = sum_k coeffs[k] cosh(rho)^k, radial about the origin."""

    coeffs: tuple
    n: int = 3

    def _c(self, x):
        r2 = _sq(as_coords(x))
        return (1.0 + r2) / (1.0 - r2)

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(self._c(x), self.coeffs)

    def grad(self, x):
        x = as_coords(x)
        r2 = _sq(x)
        d = np.polynomial.polynomial.polyder(self.coeffs)
        fc = np.polynomial.polynomial.polyval(self._c(x), d) if len(d) else 0.0 * r2
        return (fc * 4.0 / (1.0 - r2) ** 2)[..., None] * x

    def laplacian(self, x):
        # Delta_H f(c) = (c^2 - 1) f'' + n c f'
        c = self._c(x)
        d1 = np.polynomial.polynomial.polyder(self.coeffs)
        d2 = np.polynomial.polynomial.polyder(self.coeffs, 2)
        f1 = np.polynomial.polynomial.polyval(c, d1) if len(d1) else 0.0 * c
        f2 = np.polynomial.polynomial.polyval(c, d2) if len(d2) else 0.0 * c
        return (c * c - 1.0) * f2 + self.n * c * f1


@dataclass(frozen=True)
class HelgasonWave:
    """e_{lam,xi}(x) = (sqrt(1-|x|^2)/|x-xi|)^{n-1+i lam}, an eigenfunction of Delta_H."""

    lam: float
    xi: tuple

    @property
    def n(self) -> int:
        return len(self.xi)

    @property
    def eigenvalue(self) -> float:
        """-Delta_H e = eigenvalue * e."""
        return ((self.n - 1) ** 2 + self.lam**2) / 4.0

    @property
    def _s(self):
        return 0.5 * (self.n - 1 + 1j * self.lam)

    def _poisson(self, x):
        x = as_coords(x)
        xi = np.asarray(self.xi, dtype=float)
        return (1.0 - _sq(x)) / _sq(x - xi)

    def __call__(self, x):
        return np.exp(self._s * np.log(self._poisson(x)))

    def grad(self, x):
        x = as_coords(x)
        xi = np.asarray(self.xi, dtype=float)
        d = x - xi
        dd = _sq(d)
        P = (1.0 - _sq(x)) / dd
        gP = (-2.0 * x - 2.0 * P[..., None] * d) / dd[..., None]
        return (self._s * np.exp((self._s - 1.0) * np.log(P)))[..., None] * gP

    def laplacian(self, x):
        return -self.eigenvalue * self(x)


@dataclass(frozen=True)
class RealPart:
    field: object

    @property
    def n(self):
        return self.field.n

    def __call__(self, x):
        return np.real(self.field(x))

    def grad(self, x):
        return np.real(self.field.grad(x))

    def laplacian(self, x):
        return np.real(self.field.laplacian(x))


@dataclass(frozen=True)
class Composed:
    """x -> field(T_a(x)); Delta_H commutes with T_a, so no Jacobian enters."""

    field: object
    a: tuple

    @property
    def n(self):
        return self.field.n

    def __call__(self, x):
        return self.field(mobius(np.asarray(self.a), as_coords(x)))


class BumpFunction:
    """phi(y) = (1 - (s/r)^2)^3 for s = rho(y, center) < r, zero outside.

    C^2 with value, first and second derivatives vanishing at s = r.
    """

    def __init__(self, center, radius: float, n: int | None = None, amplitude: float = 1.0):
        c = as_coords(center).astype(float)
        if n is not None and c.size != n:
            raise ValueError("center dimension does not match n")
        if not radius > 0:
            raise DomainError("bump radius must be positive")
        self.center = c
        self.radius = float(radius)
        self.amplitude = float(amplitude)

    @property
    def n(self) -> int:
        return self.center.size

    def profile(self, s):
        u = np.minimum((np.asarray(s) / self.radius) ** 2, 1.0)
        return self.amplitude * (1.0 - u) ** 3

    def radial_laplacian(self, s):
        s = np.asarray(s, dtype=float)
        r2 = self.radius**2
        u = np.minimum(s * s / r2, 1.0)
        s_coth = np.where(s > 1e-8, s / np.tanh(np.maximum(s, 1e-300)), 1.0 + s * s / 3.0)
        val = -6.0 * (1.0 - u) ** 2 / r2 * (1.0 + (self.n - 1) * s_coth) + 24.0 * u * (1.0 - u) / r2
        return self.amplitude * val

    def distance(self, x):
        return pairwise_distance(as_coords(x), self.center)

    def __call__(self, x):
        return self.profile(self.distance(x))

    def grad(self, x):
        x = as_coords(x)
        c = self.center
        s = self.distance(x)
        xx = 1.0 - _sq(x)
        d = x - c
        gq = (2.0 * d * xx[..., None] + 2.0 * x * _sq(d)[..., None]) / (
            (xx**2)[..., None] * (1.0 - float(c @ c))
        )
        u = np.minimum(s * s / self.radius**2, 1.0)
        s_sinh = np.where(s > 1e-8, s / np.sinh(np.maximum(s, 1e-300)), 1.0)
        coef = -12.0 * (1.0 - u) ** 2 / self.radius**2 * s_sinh * self.amplitude
        return coef[..., None] * gq

    def laplacian(self, x):
        return self.radial_laplacian(self.distance(x))

    def mass(self) -> float:
        """int phi dV_H by Gauss-Legendre on the support (profile is a polynomial in s)."""
        g, w = leggauss(80)
        s = 0.5 * self.radius * (g + 1.0)
        return float(
            sphere_area(self.n) * 0.5 * self.radius * np.sum(w * self.profile(s) * np.sinh(s) ** (self.n - 1))
        )


def laplace_beltrami_radial(f, rho, n: int, h: float = 1e-3):
    """Delta_H of a radial function f(rho) by central differences: f'' + (n-1) coth f'."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= h):
        raise DomainError("rho must exceed the step for the radial stencil")
    fp, f0, fm = f(rho + h), f(rho), f(rho - h)
    return (fp - 2.0 * f0 + fm) / h**2 + (n - 1) / np.tanh(rho) * (fp - fm) / (2.0 * h)


def laplace_beltrami(field, x, h: float = 1e-2):
    """Delta_H field(x) from the Euclidean-chart operator with second-order stencils.

    ``h`` is a hyperbolic step; the chart step is h (1 - |x|^2)/2 so the metric
    truncation error is uniform across the ball.
    """
    x = np.atleast_2d(as_coords(x)).astype(float)
    n = x.shape[-1]
    r2 = _sq(x)
    he = h * 0.5 * (1.0 - r2)
    if np.any(np.sqrt(r2) + he >= 1.0):
        raise DomainError("stencil leaves the ball; point too close to the boundary")
    f0 = field(x)
    lap_e = -2.0 * n * f0
    x_grad = 0.0 * f0
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1.0
        fp = field(x + he[:, None] * e)
        fm = field(x - he[:, None] * e)
        lap_e = lap_e + fp + fm
        x_grad = x_grad + x[:, k] * (fp - fm) / (2.0 * he)
    lap_e = lap_e / he**2
    out = 0.25 * (1.0 - r2) ** 2 * lap_e + (n - 2) * 0.5 * (1.0 - r2) * x_grad
    return out


def fd_convergence_order(errors, factor: float = 2.0):
    """Observed orders log(e_k/e_{k+1})/log(factor) for successively refined steps."""
    e = np.abs(np.asarray(errors, dtype=float))
    return np.log(e[:-1] / e[1:]) / math.log(factor)


def _radial_rule(R, n_rho, breaks=()):
    pts = sorted({0.0, float(R), *[b for b in breaks if 0 < b < R]})
    g, w = leggauss(n_rho)
    rr, ww = [], []
    for a, b in zip(pts[:-1], pts[1:]):
        rr.append(0.5 * (b - a) * (g + 1.0) + a)
        ww.append(0.5 * (b - a) * w)
    return np.concatenate(rr), np.concatenate(ww)


def green_identity_check(u, v, R: float, n_rho: int = 40, degree: int | None = None, breaks=()):
    """Relative defects of the two Green identities on B_H(0, R).

    defect1: int (-Delta u) v - int (-Delta v) u - oint (d_rho v u - d_rho u v)
    defect2: int (-Delta u) v - int (grad u, grad v)_g + oint d_rho u v
    each divided by the largest term entering it.  ``breaks`` lists radii where
    the fields lose smoothness (bump support edges) so panels can split there.
    """
    n = u.n
    if degree is None:
        # Helgason waves sharpen towards their boundary point like 1 - tanh(R/2)
        degree = max(30, int(45 * R))
    sph = sphere_grid(n, degree)
    rho, wr = _radial_rule(R, n_rho, breaks)
    wr = wr * np.sinh(rho) ** (n - 1)
    pts = to_ball(rho[:, None], sph.nodes[None, :, :])
    W = wr[:, None] * sph.weights[None, :]
    r2 = _sq(pts)
    lam_inv = 0.5 * (1.0 - r2)
    uu, vv = u(pts), v(pts)
    Lu, Lv = -u.laplacian(pts), -v.laplacian(pts)
    gu, gv = u.grad(pts), v.grad(pts)
    vol_Luv = np.sum(W * Lu * vv)
    vol_Lvu = np.sum(W * Lv * uu)
    vol_grad = np.sum(W * lam_inv**2 * np.sum(gu * gv, axis=-1))

    bpts = to_ball(np.full(len(sph), R), sph.nodes)
    bw = sph.weights * surface_weight(R, n)
    b_lam_inv = 0.5 * (1.0 - _sq(bpts))
    du = b_lam_inv * np.sum(sph.nodes * u.grad(bpts), axis=-1)
    dv = b_lam_inv * np.sum(sph.nodes * v.grad(bpts), axis=-1)
    ub, vb = u(bpts), v(bpts)
    s_vu = np.sum(bw * dv * ub)
    s_uv = np.sum(bw * du * vb)

    t1 = (vol_Luv, vol_Lvu, s_vu, s_uv)
    d1 = abs(vol_Luv - vol_Lvu - (s_vu - s_uv)) / max(max(abs(t) for t in t1), 1e-300)
    t2 = (vol_Luv, vol_grad, s_uv)
    d2 = abs(vol_Luv - vol_grad + s_uv) / max(max(abs(t) for t in t2), 1e-300)
    return float(d1), float(d2)


def fundamental_solution_test(mu: float, branch, phi: BumpFunction, x0, n: int = 3,
                              n_rho: int = 24, degree: int = 24, table=None):
    """|int G(rho(x0,y)) (-Delta_H - (n-1)^2/4 - mu^2) phi(y) dV(y) - phi(x0)|.

    The quadrature is polar about x0 after the isometry T_{x0}, with the radial
    rule fitted to where each ray crosses supp phi; the Jacobian sinh^{n-1}
    absorbs the kernel singularity.  phi has sup 1 so this is also the defect
    relative to phi.
    """
    from .kernels import GreenTable, spectral_param

    x0 = as_coords(x0)
    if x0.size != n or phi.n != n:
        raise ValueError("dimension mismatch")
    sph = sphere_grid(n, degree)
    s, dirs, w, pts = translated_ball_grid(x0, phi.center, phi.radius, n_rho, sph)
    expected = float(phi(x0))
    if s.size == 0:
        return abs(0.0 - expected)
    if table is None:
        table = GreenTable(spectral_param(mu, branch, n), rho_max=float(s.max()) + 0.5)
    # G(s) sinh^{n-1}(s) = g_sinh(s) sinh(s); strip sinh^{n-1} back out of the weights
    w_flat = w / np.sinh(s) ** (n - 1)
    Lphi = -phi.laplacian(pts) - ((n - 1) ** 2 / 4.0 + mu * mu) * phi(pts)
    val = np.sum(w_flat * table.g_sinh(s) * np.sinh(s) * Lphi)
    if not np.isfinite(val):
        raise DomainError("fundamental-solution quadrature produced a non-finite value")
    return float(abs(val - expected))

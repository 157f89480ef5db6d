"""Source scattering: u = G * f, far-field patterns and radiation diagnostics.

Far field convention: u(x) = cosh(rho/2)^{-2z-(n-1)} u_inf(xhat) + O(sinh^{-(n+1)/2} rho)
with z = -i mu (outgoing) or +i mu (ingoing).  u_inf therefore carries the
endpoint integral int_0^pi (sin t)^{2z} dt and the constant 2^{-z}.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .geometry import (
    PolarGrid,
    SphereGrid,
    as_coords,
    geodesic_radius,
    log_cosh,
    log_sinh,
    polar_distance,
    polar_grid,
    sphere_grid,
    translated_ball_grid,
)
from .kernels import Branch, GreenTable, radiation_condition_coefficient, spectral_param
from .specfun import log_green_prefactor, q_integral_limit

__all__ = [
    "CompactField",
    "FarFieldPattern",
    "SourceSolution",
    "KernelField",
    "RadiationReport",
    "solve_source",
    "far_field",
    "far_field_prefactor",
    "radiation_check_field",
    "helmholtz_residual",
    "to_polar_arrays",
]

_BLOCK = 1_500_000


@dataclass
class CompactField:
    """Values of a function on a polar grid of B_H(0, R0).

    ``func`` (optional) evaluates the same function anywhere; it enables the
    singularity-absorbing near-field quadrature.
    """

    grid: PolarGrid
    values: np.ndarray
    func: object = field(default=None, repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != self.grid.weights.shape:
            raise ValueError("values must match the grid")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")

    @property
    def R0(self) -> float:
        return self.grid.R0

    @property
    def n(self) -> int:
        return self.grid.n

    @classmethod
    def from_function(cls, func, R0: float, n_rho: int, sphere: SphereGrid):
        g = polar_grid(R0, n_rho, sphere)
        return cls(g, func(g.points), func)

    @classmethod
    def zeros(cls, R0: float, n_rho: int, sphere: SphereGrid):
        g = polar_grid(R0, n_rho, sphere)
        return cls(g, np.zeros(len(g)), lambda x: np.zeros(np.shape(x)[:-1]))

    def integrate(self) -> complex:
        return complex(self.grid.integrate(self.values))

    def _combine(self, other, a, b):
        g, h = self.grid, other.grid
        if g is not h and not (np.array_equal(g.rho, h.rho) and np.array_equal(g.dirs, h.dirs)
                               and np.array_equal(g.weights, h.weights)):
            raise ValueError("fields live on different grids")
        f1, f2 = self.func, other.func
        func = None if f1 is None or f2 is None else (lambda x: a * f1(x) + b * f2(x))
        return CompactField(self.grid, a * self.values + b * other.values, func)

    def __add__(self, other):
        return self._combine(other, 1.0, 1.0)

    def __sub__(self, other):
        return self._combine(other, 1.0, -1.0)

    def __mul__(self, c):
        f = self.func
        return CompactField(self.grid, c * self.values, None if f is None else (lambda x: c * f(x)))

    __rmul__ = __mul__

    def conj(self):
        f = self.func
        return CompactField(self.grid, np.conj(self.values), None if f is None else (lambda x: np.conj(f(x))))


@dataclass(frozen=True)
class FarFieldPattern:
    directions: np.ndarray
    amplitudes: np.ndarray
    mu: float
    n: int
    branch: str = "outgoing"

    def __post_init__(self):
        if not np.all(np.isfinite(self.amplitudes)):
            raise ValueError("far-field amplitudes must be finite")


def to_polar_arrays(points):
    """Ball coordinates (..., n) -> (rho, unit directions); the origin gets e_1."""
    x = np.atleast_2d(as_coords(points))
    r = np.linalg.norm(x, axis=-1)
    rho = 2.0 * np.arctanh(r)
    dirs = np.where(r[:, None] > 0, x / np.where(r > 0, r, 1.0)[:, None], np.eye(x.shape[-1])[0])
    return rho, dirs


_TABLES: dict = {}


def _table(mu, branch, n, rho_max):
    key = (float(mu), Branch(branch).value, int(n))
    tab = _TABLES.get(key)
    if tab is None or tab.edges[-1] < rho_max:
        tab = GreenTable(spectral_param(mu, branch, n), rho_max=4.0 * math.ceil(rho_max / 4.0))
        _TABLES[key] = tab
    return tab


class SourceSolution:
    """u = int G(rho(x, y)) f(y) dV_H(y) as an evaluator."""

    def __init__(self, f: CompactField, mu: float, branch="outgoing", near_margin: float = 0.5,
                 near_n_rho: int | None = None, near_degree: int | None = None):
        if not mu > 0:
            raise DomainError("mu must be positive")
        self.f = f
        self.mu = float(mu)
        self.branch = Branch(branch)
        self.n = f.n
        self.near_margin = near_margin
        self.near_n_rho = near_n_rho or 2 * f.grid.n_rho
        self.near_degree = near_degree or 2 * f.grid.sphere.degree

    def _nodal(self, rho, dirs):
        g = self.f.grid
        tab = _table(self.mu, self.branch, self.n, float(np.max(rho)) + g.R0 + 0.1)
        wf = g.weights * self.f.values
        out = np.empty(rho.shape, dtype=complex)
        step = max(1, _BLOCK // len(g))
        for i in range(0, rho.size, step):
            d = polar_distance(rho[i:i + step, None], dirs[i:i + step, None, :], g.rho[None, :], g.dirs)
            if np.any(d < 1e-12):
                raise DomainError("evaluation point coincides with a source node")
            out[i:i + step] = tab(d) @ wf
        return out

    def _near(self, x):
        g = self.f.grid
        sph = sphere_grid(self.n, self.near_degree)
        # fit the rays to the source's own support when it advertises one
        center = getattr(self.f.func, "center", np.zeros(self.n))
        radius = getattr(self.f.func, "radius", g.R0)
        s, _, w, pts = translated_ball_grid(x, center, radius, self.near_n_rho, sph)
        if s.size == 0:
            return 0j
        tab = _table(self.mu, self.branch, self.n, float(s.max()) + 0.1)
        wn = w / np.sinh(s) ** (self.n - 1)
        return complex(np.sum(wn * tab.g_sinh(s) * np.sinh(s) * self.f.func(pts)))

    def polar(self, rho, dirs):
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
        dirs = np.broadcast_to(dirs, rho.shape + (self.n,))
        out = np.empty(rho.shape, dtype=complex)
        near = rho < self.f.R0 + self.near_margin
        if self.f.func is None:
            near[:] = False
        if np.any(~near):
            out[~near] = self._nodal(rho[~near], dirs[~near])
        for i in np.flatnonzero(near):
            x = np.tanh(0.5 * rho[i]) * dirs[i]
            out[i] = self._near(x)
        return out

    def __call__(self, points):
        rho, dirs = to_polar_arrays(points)
        return self.polar(rho, dirs)


def solve_source(f: CompactField, mu: float, branch="outgoing", eval_points=None, **kw):
    """Values of u = G * f at ``eval_points`` (ball coordinates, shape (m, n))."""
    sol = SourceSolution(f, mu, branch, **kw)
    if eval_points is None:
        return sol
    return sol(eval_points)


def far_field_prefactor(rho, mu: float, n: int, branch="outgoing"):
    """cosh(rho/2)^{-2z-(n-1)}, the radial factor multiplying u_inf."""
    z = spectral_param(mu, branch, n).z
    return np.exp((-2.0 * z - (n - 1)) * log_cosh(0.5 * np.asarray(rho, dtype=float)))


def far_field(f: CompactField, mu: float, sphere: SphereGrid | np.ndarray, branch="outgoing"):
    """u_inf(xhat) = C int cosh(rho(y)/2)^{-2z-(n-1)} (1 - 2 xhat.y + |y|^2)^{-z-(n-1)/2} f(y) dV(y).

    C = A_{n,z} 2^{-z} 2^{-(n-1)/2} int_0^pi (sin t)^{2z} dt.
    """
    n = f.n
    sp = spectral_param(mu, branch, n)
    z = sp.z
    dirs = sphere.nodes if isinstance(sphere, SphereGrid) else np.atleast_2d(sphere)
    C = cmath.exp(log_green_prefactor(sp) - z * math.log(2.0) - 0.5 * (n - 1) * math.log(2.0)) * q_integral_limit(z)
    g = f.grid
    y = g.points
    yy = np.sum(y * y, axis=-1)
    radial = np.exp((-2.0 * z - (n - 1)) * log_cosh(0.5 * g.rho)) * g.weights * f.values
    q = 1.0 - 2.0 * dirs @ y.T + yy[None, :]
    amp = C * (np.exp((-z - 0.5 * (n - 1)) * np.log(q)) @ radial)
    return FarFieldPattern(dirs, amp, float(mu), n, Branch(branch).value)


class KernelField:
    """x -> G(rho(x, y0)) as a polar evaluator (the point-source field)."""

    def __init__(self, mu: float, y0, branch="outgoing", n: int | None = None):
        self.y0 = as_coords(y0).astype(float)
        self.n = n or self.y0.size
        self.mu = mu
        self.branch = Branch(branch)
        self.ry = float(geodesic_radius(self.y0))
        self.ydir = self.y0 / np.linalg.norm(self.y0) if self.ry > 0 else np.eye(self.n)[0]

    def polar(self, rho, dirs):
        d = polar_distance(np.asarray(rho, dtype=float), np.asarray(dirs, dtype=float), self.ry, self.ydir)
        tab = _table(self.mu, self.branch, self.n, float(np.max(d)) + 0.1)
        return tab(d)

    def __call__(self, points):
        rho, dirs = to_polar_arrays(points)
        return self.polar(rho, dirs)


@dataclass(frozen=True)
class RadiationReport:
    rho: np.ndarray
    residual_norm: np.ndarray
    scaled_residual: np.ndarray
    decay_scaled_residual: np.ndarray
    flux: np.ndarray

    @property
    def decreasing(self) -> bool:
        return bool(np.all(np.diff(self.scaled_residual) < 0))

    @property
    def passes(self) -> bool:
        """Residual o(sinh^{-(n-1)/2}) along the ladder with a bounded flux."""
        return self.decreasing and bool(np.all(np.isfinite(self.flux)))


def radiation_check_field(u, mu: float, rho_ladder, sphere: SphereGrid, branch="outgoing", n=None):
    """Sphere-L2 norms of du/drho - c tanh(rho/2) u on each radius of ``rho_ladder``.

    ``u`` needs a ``polar(rho, dirs)`` method.  ``branch`` selects which
    condition is tested.  Also returns the flux oint |u|^2 dsigma_H.
    """
    n = n or sphere.n
    c = radiation_condition_coefficient(mu, n, branch)
    dirs = sphere.nodes
    res_norm, flux = [], []
    for R in rho_ladder:
        h = min(1e-3, R * 1e-4)
        vals = {k: u.polar(np.full(len(sphere), R + k * h), dirs) for k in (-2, -1, 0, 1, 2)}
        du = (-vals[2] + 8.0 * vals[1] - 8.0 * vals[-1] + vals[-2]) / (12.0 * h)
        res = du - c * math.tanh(0.5 * R) * vals[0]
        res_norm.append(math.sqrt(float(sphere.integrate(np.abs(res) ** 2))))
        flux.append(float(sphere.integrate(np.abs(vals[0]) ** 2)) * math.exp((n - 1) * float(log_sinh(R))))
    rho = np.asarray(rho_ladder, dtype=float)
    res_norm = np.array(res_norm)
    return RadiationReport(
        rho,
        res_norm,
        res_norm * np.exp(0.5 * (n - 1) * log_sinh(rho)),
        res_norm * np.exp(0.5 * (n + 1) * log_sinh(rho)),
        np.array(flux),
    )


def helmholtz_residual(u, x, mu: float, h: float = 1e-2, source=None):
    """(-Delta_H - (n-1)^2/4 - mu^2) u(x) - f(x) with the FD Laplace-Beltrami operator."""
    from .calculus import laplace_beltrami

    x = np.atleast_2d(as_coords(x))
    n = x.shape[-1]
    lap = laplace_beltrami(u, x, h)
    res = -lap - ((n - 1) ** 2 / 4.0 + mu * mu) * u(x)
    if source is not None:
        res = res - source(x)
    return res

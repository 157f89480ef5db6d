"""Potential scattering in H^3 by a Nystrom discretization of

    u^s(x) = mu^2 int G(rho(x,y)) (V(y) - 1) (u^s + u^i)(y) dV_H(y).

The kernel singularity is handled by subtracting the density at the target:

    int G(x,y) g(y) dV  ~  sum_{j != i} w_j G_ij (g_j - g_i) + g_i W(x_i),

with W(x) = int_{grid ball} G(rho(x,y)) dV(y) done as a 1-D integral over
geodesic spheres about x.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ConditioningError, DomainError, UnsupportedDimensionError
from .geometry import PolarGrid, SphereGrid, as_coords, log_sinh, pairwise_distance, polar_distance, polar_grid, sphere_grid
from .kernels import Branch, GreenTable, spectral_param
from .quadrature import adaptive_gk
from .source_scatter import CompactField, FarFieldPattern, far_field, to_polar_arrays

__all__ = [
    "PROFILES",
    "Potential",
    "NystromSystem",
    "ScatteringSolution",
    "incident_wave",
    "assemble",
    "solve",
    "born_first",
    "neumann_series",
    "rellich_flux",
    "energy_balance",
    "ball_kernel_integral",
    "thread_count",
]

PROFILES = {
    "bump": lambda t: (1.0 - t * t) ** 3,
    "cos2": lambda t: np.cos(0.5 * np.pi * t) ** 2,
    "gauss": lambda t: np.exp(-4.0 * t * t) * (1.0 - t * t) ** 2,
}


def thread_count() -> int:
    env = os.environ.get("HYPERSCATTER_THREADS")
    if env:
        return max(1, int(env))
    return max(1, min(8, os.cpu_count() or 1))


def incident_wave(mu: float, xi, x):
    """e_{2 mu, xi}(x), solving (-Delta_H - (n-1)^2/4 - mu^2) e = 0."""
    from .modes import incident_wave as _iw

    return _iw(mu, xi, x)


class Potential:
    """V - 1 = (amplitude + i imag) * profile(rho(x, center) / R0), zero outside.

    Sampled on a polar grid about the origin whose radius covers the support.
    """

    def __init__(self, R0: float, amplitude: complex = 0.0, profile: str = "bump", center=None,
                 imag: float = 0.0, n: int = 3, n_rho: int = 10, degree: int = 11,
                 im_nonneg: bool | None = None):
        if not R0 > 0:
            raise DomainError("R0 must be positive")
        if profile not in PROFILES:
            raise ValueError(f"unknown profile {profile!r}; choose from {sorted(PROFILES)}")
        self.R0 = float(R0)
        self.amplitude = complex(amplitude)
        self.imag = float(imag)
        self.profile = profile
        self.center = np.zeros(n) if center is None else as_coords(center).astype(float)
        self.n = n
        self.scale = self.amplitude + 1j * self.imag
        crho = float(2.0 * np.arctanh(np.linalg.norm(self.center)))
        grid = polar_grid(crho + self.R0, n_rho, sphere_grid(n, degree))
        self.contrast = CompactField(grid, self(grid.points), self)
        if im_nonneg is None:
            im_nonneg = bool(self.scale.imag >= 0)
        if im_nonneg and np.min(self.contrast.values.imag) < -1e-14:
            raise ValueError("potential flagged Im V >= 0 but has negative imaginary part")
        self.im_nonneg = im_nonneg

    @property
    def radius(self):
        return self.R0

    def __call__(self, x):
        t = pairwise_distance(as_coords(x), self.center) / self.R0
        prof = np.where(t < 1.0, PROFILES[self.profile](np.minimum(t, 1.0)), 0.0)
        return self.scale * prof

    @property
    def is_trivial(self) -> bool:
        return self.scale == 0

    def descriptor(self) -> dict:
        return {
            "R0": self.R0,
            "center": self.center.tolist(),
            "profile": self.profile,
            "amplitude": [self.amplitude.real, self.amplitude.imag],
            "imag": self.imag,
            "n": self.n,
            "n_rho": self.contrast.grid.n_rho,
            "degree": self.contrast.grid.sphere.degree,
        }

    @classmethod
    def from_descriptor(cls, d: dict, **overrides):
        d = {**d, **overrides}
        amp = d.get("amplitude", 0.0)
        if isinstance(amp, (list, tuple)):
            amp = complex(amp[0], amp[1])
        return cls(
            R0=d["R0"],
            amplitude=amp,
            profile=d.get("profile", "bump"),
            center=d.get("center"),
            imag=d.get("imag", 0.0),
            n=d.get("n", 3),
            n_rho=d.get("n_rho", 10),
            degree=d.get("degree", 11),
        )

    @classmethod
    def from_json(cls, path, **overrides):
        with open(path) as fh:
            return cls.from_descriptor(json.load(fh), **overrides)

    def scaled(self, c: float) -> "Potential":
        g = self.contrast.grid
        return Potential(self.R0, c * self.amplitude, self.profile, self.center, c * self.imag, self.n,
                         g.n_rho, g.sphere.degree)


def ball_kernel_integral(d, R: float, table: GreenTable):
    """W = int_{B_H(0,R)} G(rho(x, y)) dV(y) for rho(x) = d, n = 3.

    Integrates G(s) sinh^2(s) Omega(s) over s, Omega being the solid angle of the
    geodesic sphere S(x, s) that lies inside the ball.
    """
    d = float(d)
    ch_d, sh_d, ch_R = math.cosh(d), math.sinh(d), math.cosh(R)

    def f(s):
        sh = np.sinh(s)
        if sh_d == 0.0:
            omega = np.where(s <= R, 4.0 * np.pi, 0.0)
        else:
            kappa = (ch_d * np.cosh(s) - ch_R) / (sh_d * np.maximum(sh, 1e-300))
            omega = 2.0 * np.pi * (1.0 - np.clip(kappa, -1.0, 1.0))
        return table.g_sinh(s) * sh * omega

    if d < R:
        edges = [0.0, R - d, R + d] if d > 0 else [0.0, R]
    else:
        edges = [d - R, d + R]
    edges = np.unique(np.concatenate([np.linspace(a, b, max(2, int(math.ceil((b - a) / 0.5)) + 1))
                                      for a, b in zip(edges[:-1], edges[1:])]))
    val, _ = adaptive_gk(f, edges, abs_tol=1e-14, rel_tol=1e-12)
    return complex(val)


@dataclass
class NystromSystem:
    grid: PolarGrid
    contrast: np.ndarray
    mu: float
    branch: str
    matrix: np.ndarray
    K: np.ndarray
    rhs: np.ndarray
    incident: np.ndarray
    self_integrals: np.ndarray
    table: GreenTable = field(repr=False)
    xi: np.ndarray = field(default=None)
    potential: Potential | None = field(default=None, repr=False)
    _sigma: float | None = field(default=None, repr=False)

    @property
    def nodes(self):
        return self.grid.points

    @property
    def weights(self):
        return self.grid.weights

    def sigma_min(self) -> float:
        """Smallest singular value of I - K in the weighted L^2 inner product."""
        if self._sigma is None:
            sw = np.sqrt(self.grid.weights)
            S = sw[:, None] * self.matrix / sw[None, :]
            self._sigma = float(scipy.linalg.svdvals(S, check_finite=False)[-1])
        return self._sigma


def _kernel_rows(grid: PolarGrid, table: GreenTable, rows):
    d = polar_distance(grid.rho[rows, None], grid.dirs[rows, None, :], grid.rho[None, :], grid.dirs)
    d[np.arange(len(rows)), rows] = 1.0
    G = table(d)
    G[np.arange(len(rows)), rows] = 0.0
    return G


def _kernel_matrix(grid: PolarGrid, table: GreenTable, threads: int):
    N = len(grid)
    G = np.empty((N, N), dtype=complex)
    blocks = [np.arange(i, min(N, i + 256)) for i in range(0, N, 256)]

    def work(rows):
        G[rows] = _kernel_rows(grid, table, rows)

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            list(ex.map(work, blocks))
    else:
        for rows in blocks:
            work(rows)
    return G


def _check_resolution(grid: PolarGrid, mu: float):
    x = np.unique(grid.rho)
    gaps = np.diff(np.concatenate([[0.0], x, [grid.R0]]))
    if gaps.max() > 2.0 * math.pi / (6.0 * mu):
        raise DomainError("grid too coarse: fewer than 6 radial nodes per wavelength 2 pi / mu")


def assemble(potential: Potential, mu: float, branch="outgoing", n: int = 3, xi=None,
             threads: int | None = None) -> NystromSystem:
    """Dense (I - K) with the singularity-subtracted diagonal and rhs = K u^i."""
    if n != 3 or potential.n != 3:
        raise UnsupportedDimensionError("the Nystrom solver is implemented for n = 3")
    if not mu > 0:
        raise DomainError("mu must be positive")
    grid = potential.contrast.grid
    _check_resolution(grid, mu)
    c = potential.contrast.values
    xi = np.eye(n)[0] if xi is None else np.asarray(xi, dtype=float)
    ui = incident_wave(mu, xi, grid.points)
    R = grid.R0
    table = GreenTable(spectral_param(mu, branch, n), rho_max=2.0 * R + 0.5)
    N = len(grid)
    if potential.is_trivial:
        K = np.zeros((N, N), dtype=complex)
        W = np.zeros(grid.n_rho, dtype=complex)
    else:
        G = _kernel_matrix(grid, table, threads or thread_count())
        W_r = np.array([ball_kernel_integral(r, R, table) for r in np.unique(grid.rho)])
        W = W_r[np.searchsorted(np.unique(grid.rho), grid.rho)]
        K = G * (mu * mu * grid.weights * c)[None, :]
        diag = mu * mu * c * (W - G @ grid.weights)
        K[np.diag_indices(N)] = diag
        del G
    A = np.eye(N, dtype=complex) - K
    rhs = K @ ui
    return NystromSystem(grid, c, float(mu), Branch(branch).value, A, K, rhs, ui, W, table, xi, potential)


@dataclass
class ScatteringSolution:
    system: NystromSystem
    us: np.ndarray
    sigma_min: float

    @property
    def n(self):
        return self.system.grid.n

    @property
    def total_nodes(self):
        return self.us + self.system.incident

    @property
    def source(self) -> CompactField:
        """mu^2 (V - 1)(u^s + u^i) on the grid: the compactly supported source of u^s."""
        s = self.system
        return CompactField(s.grid, s.mu**2 * s.contrast * self.total_nodes)

    def far_field(self, sphere: SphereGrid) -> FarFieldPattern:
        return far_field(self.source, self.system.mu, sphere, self.system.branch)

    def polar(self, rho, dirs):
        """Scattered field anywhere: representation formula off the grid ball,
        Nystrom interpolation (same subtraction as the matrix) inside it."""
        s = self.system
        g = s.grid
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        dirs = np.broadcast_to(np.atleast_2d(dirs), rho.shape + (g.n,))
        f = s.mu**2 * s.contrast * self.total_nodes
        wf = g.weights * f
        tab = s.table
        need = float(rho.max()) + g.R0 + 0.1
        if tab.edges[-1] < need:
            tab = GreenTable(tab.sp, rho_max=need)
        out = np.empty(rho.shape, dtype=complex)
        for i in range(rho.size):
            d = polar_distance(rho[i], dirs[i], g.rho, g.dirs)
            hit = d < 1e-12
            dd = np.where(hit, 1.0, d)
            Gx = np.where(hit, 0.0, tab(dd))
            if rho[i] > g.R0 or s.potential is None:
                out[i] = Gx @ wf
                continue
            x = np.tanh(0.5 * rho[i]) * dirs[i]
            cx = complex(s.potential(x))
            if cx == 0:
                out[i] = Gx @ wf
                continue
            uix = complex(incident_wave(s.mu, s.xi, x)) if np.any(s.incident) else 0j
            Wd = ball_kernel_integral(rho[i], g.R0, tab) - Gx @ g.weights
            S1 = Gx @ wf
            m2 = s.mu**2
            out[i] = (S1 + m2 * cx * Wd * uix) / (1.0 - m2 * cx * Wd)
        return out

    def __call__(self, points):
        rho, dirs = to_polar_arrays(points)
        return self.polar(rho, dirs)

    def total(self, points):
        if not np.any(self.system.incident):
            return self(points)
        return self(points) + incident_wave(self.system.mu, self.system.xi, points)


def solve(system: NystromSystem, sigma_floor: float = 1e-8) -> ScatteringSolution:
    """LU solve of (I - K) u^s = K u^i with one step of iterative refinement."""
    if not np.any(system.K):
        return ScatteringSolution(system, np.zeros_like(system.rhs), 1.0)
    sig = system.sigma_min()
    if sig < sigma_floor:
        raise ConditioningError(f"I - K is numerically singular (sigma_min = {sig:.3e})", sig)
    lu = scipy.linalg.lu_factor(system.matrix, check_finite=False)
    us = scipy.linalg.lu_solve(lu, system.rhs)
    r = system.rhs - system.matrix @ us
    us = us + scipy.linalg.lu_solve(lu, r)
    return ScatteringSolution(system, us, sig)


def born_first(system: NystromSystem) -> np.ndarray:
    """First Born term K u^i."""
    return system.rhs.copy()


def neumann_series(system: NystromSystem, terms: int) -> np.ndarray:
    """sum_{j=1..terms} K^j u^i."""
    acc = np.zeros_like(system.rhs)
    v = system.incident
    for _ in range(terms):
        v = system.K @ v
        acc = acc + v
    return acc


def rellich_flux(u, rho_ladder, sphere: SphereGrid):
    """oint_{dB_H(0,R)} |u|^2 dsigma_H for each R; ``u`` has a polar(rho, dirs) method."""
    n = sphere.n
    out = []
    for R in rho_ladder:
        vals = u.polar(np.full(len(sphere), float(R)), sphere.nodes)
        out.append(float(sphere.integrate(np.abs(vals) ** 2)) * math.exp((n - 1) * float(log_sinh(R))))
    return np.array(out)


def energy_balance(solution: ScatteringSolution, R: float, sphere: SphereGrid):
    """(Im oint conj(u) d_rho u dsigma_H, -mu^2 int Im V |u|^2 dV) for the total field.

    Green's identity makes the two equal; both are <= 0 when Im V >= 0.
    """
    s = solution.system
    if R <= s.grid.R0:
        raise DomainError("energy balance sphere must enclose the potential")
    n = sphere.n
    h = min(1e-3, 1e-4 * R)
    dirs = sphere.nodes

    def total(r):
        pts = np.tanh(0.5 * r) * dirs
        return solution.polar(np.full(len(sphere), r), dirs) + incident_wave(s.mu, s.xi, pts)

    v = {k: total(R + k * h) for k in (-2, -1, 0, 1, 2)}
    du = (-v[2] + 8 * v[1] - 8 * v[-1] + v[-2]) / (12 * h)
    flux = float(np.imag(sphere.integrate(np.conj(v[0]) * du))) * math.exp((n - 1) * float(log_sinh(R)))
    absorb = -s.mu**2 * float(np.sum(s.grid.weights * s.contrast.imag * np.abs(solution.total_nodes) ** 2))
    return flux, absorb

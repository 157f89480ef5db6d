"""Radial kernels on hyperbolic space.

    G_z(rho) = A_{n,z} cosh(rho)^{(n-3)/2 - z} sinh(rho)^{-(n-2)} J(rho, z)

is the kernel of (-Delta_H - (n-1)^2/4 + z^2)^{-1}.  Real z = k > 0 gives the
damped resolvent; z = -i mu is the outgoing Helmholtz Green function and
z = +i mu the ingoing one.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, UnsupportedDimensionError
from .geometry import (
    as_coords,
    geodesic_radius,
    log_cosh,
    log_sinh,
    polar_distance,
    sphere_area,
    sphere_grid,
)
from .quadrature import adaptive_gk
from .specfun import (
    SpectralParam,
    log_green_prefactor,
    q_integral_limit,
    scaled_q_integral,
)

__all__ = [
    "Branch",
    "RadialKernelEval",
    "AsymptoticEval",
    "GreenTable",
    "spectral_param",
    "green_kernel",
    "resolvent_kernel",
    "helmholtz_green",
    "helmholtz_green_values",
    "closed_form_green_3d",
    "singular_constant",
    "heat_kernel",
    "heat_mass",
    "heat_semigroup_defect",
    "heat_resolvent_check",
    "green_asymptotic",
    "green_asymptotic_polar",
    "asymptotic_ladder",
    "radiation_condition_coefficient",
    "radiation_residual",
    "radial_ode_residual",
]


class Branch(str, enum.Enum):
    OUTGOING = "outgoing"
    INGOING = "ingoing"

    @property
    def sign(self) -> int:
        """z = sign * i mu."""
        return -1 if self is Branch.OUTGOING else 1

    @property
    def other(self) -> "Branch":
        return Branch.INGOING if self is Branch.OUTGOING else Branch.OUTGOING


def spectral_param(mu: float, branch, n: int, eps: float = 0.0) -> SpectralParam:
    branch = Branch(branch)
    if branch is Branch.OUTGOING:
        return SpectralParam.outgoing(mu, n, eps)
    return SpectralParam.ingoing(mu, n, eps)


@dataclass(frozen=True)
class RadialKernelEval:
    rho: float
    value: complex
    error_estimate: float

    def __post_init__(self):
        if self.error_estimate < 0:
            raise ValueError("error estimate must be nonnegative")


@dataclass(frozen=True)
class AsymptoticEval:
    leading: complex
    remainder_bound_scale: float


def _check_kernel_dim(n: int):
    if n < 3:
        raise UnsupportedDimensionError("the Green function formula needs n >= 3")


def green_kernel(rho: float, sp: SpectralParam) -> RadialKernelEval:
    """G_z(rho) for any admissible spectral parameter (Re 2z > -1)."""
    _check_kernel_dim(sp.n)
    if not rho > 0:
        raise DomainError("rho must be positive")
    J, err = scaled_q_integral(rho, sp)
    log_scale = (
        log_green_prefactor(sp)
        + sp.exponent * float(log_cosh(rho))
        - (sp.n - 2) * float(log_sinh(rho))
    )
    scale = cmath.exp(log_scale)
    return RadialKernelEval(float(rho), scale * J, abs(scale) * err)


def resolvent_kernel(rho: float, sp: SpectralParam) -> RadialKernelEval:
    """Kernel of (-Delta_H - (n-1)^2/4 + k^2)^{-1}, Re k > 0."""
    if not sp.z.real > 0:
        raise DomainError("resolvent_kernel needs Re z > 0")
    return green_kernel(rho, sp)


def helmholtz_green(rho: float, mu: float, branch="outgoing", n: int = 3) -> RadialKernelEval:
    """Limiting-absorption Green function G_{-+i mu}(rho) of the Helmholtz operator."""
    if not mu > 0:
        raise DomainError("wavenumber mu must be positive")
    return green_kernel(rho, spectral_param(mu, branch, n))


def helmholtz_green_values(rhos, mu: float, branch="outgoing", n: int = 3):
    rhos = np.asarray(rhos, dtype=float)
    out = np.empty(rhos.shape, dtype=complex)
    sp = spectral_param(mu, branch, n)
    for idx, r in np.ndenumerate(rhos):
        out[idx] = green_kernel(r, sp).value
    return out


def closed_form_green_3d(rho, z):
    """exp(-z rho) / (4 pi sinh rho): the n = 3 kernel in closed form."""
    rho = np.asarray(rho, dtype=float)
    return np.exp(-z * rho) / (4.0 * np.pi * np.sinh(rho))


def singular_constant(n: int) -> float:
    """lim G(rho) rho^{n-2} as rho -> 0, i.e. the Newtonian constant Gamma(n/2-1)/(4 pi^{n/2})."""
    return math.gamma(n / 2.0 - 1.0) / (4.0 * math.pi ** (n / 2.0))


class GreenTable:
    """Piecewise-Chebyshev table of J(rho, z) for fast bulk kernel evaluation.

    Panels double in width from ``rho_min`` up to 0.5 and are 0.5 wide beyond.
    For n = 3 the first panel starts at 0 (J is analytic there); for n > 3 J has
    logarithmic terms at 0 and points below ``rho_min`` fall back to direct
    quadrature.
    """

    degree = 24

    def __init__(self, sp: SpectralParam, rho_max: float, rho_min: float = 1.0 / 64):
        _check_kernel_dim(sp.n)
        self.sp = sp
        self.rho_max = float(rho_max)
        self.rho_min = rho_min if sp.n > 3 else 0.0
        edges = [rho_min]
        while edges[-1] < 0.5:
            edges.append(2 * edges[-1])
        x = edges[-1]
        while x < rho_max:
            x += 0.5
            edges.append(x)
        if sp.n == 3:
            edges[0] = 0.0
        self.edges = np.array(edges)
        N = self.degree
        theta = np.pi * (np.arange(N) + 0.5) / N
        xk = np.cos(theta)
        basis = np.cos(np.outer(np.arange(N), theta))
        coeffs = np.empty((self.edges.size - 1, N), dtype=complex)
        for p, (a, b) in enumerate(zip(self.edges[:-1], self.edges[1:])):
            r = 0.5 * (a + b) + 0.5 * (b - a) * xk
            vals = np.array([scaled_q_integral(ri, sp)[0] for ri in r])
            c = (2.0 / N) * (basis @ vals)
            c[0] *= 0.5
            coeffs[p] = c
        self.coeffs = coeffs
        self.log_A = log_green_prefactor(sp)

    @classmethod
    def helmholtz(cls, mu: float, branch="outgoing", n: int = 3, rho_max: float = 10.0):
        return cls(spectral_param(mu, branch, n), rho_max)

    def J(self, rho):
        rho = np.asarray(rho, dtype=float)
        flat = rho.reshape(-1)
        if np.any(flat > self.edges[-1]) or np.any(flat < 0):
            raise DomainError(f"rho outside the table range [0, {self.edges[-1]}]")
        out = np.empty(flat.shape, dtype=complex)
        low = flat < self.edges[0] if self.sp.n > 3 else np.zeros(flat.shape, bool)
        for i in np.flatnonzero(low):
            out[i] = scaled_q_integral(flat[i], self.sp)[0]
        hi = ~low
        r = flat[hi]
        p = np.clip(np.searchsorted(self.edges, r, side="right") - 1, 0, self.coeffs.shape[0] - 1)
        a = self.edges[p]
        b = self.edges[p + 1]
        x = (2.0 * r - a - b) / (b - a)
        b1 = np.zeros(r.shape, dtype=complex)
        b2 = np.zeros(r.shape, dtype=complex)
        for j in range(self.degree - 1, 0, -1):
            b1, b2 = 2.0 * x * b1 - b2 + self.coeffs[p, j], b1
        out[hi] = x * b1 - b2 + self.coeffs[p, 0]
        return out.reshape(rho.shape)

    def g_sinh(self, rho):
        """G(rho) * sinh(rho)^{n-2}, bounded near rho = 0."""
        rho = np.asarray(rho, dtype=float)
        return np.exp(self.log_A + self.sp.exponent * log_cosh(rho)) * self.J(rho)

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        n = self.sp.n
        return np.exp(self.log_A + self.sp.exponent * log_cosh(rho) - (n - 2) * log_sinh(rho)) * self.J(rho)


# ---------------------------------------------------------------------------
# heat kernel


@lru_cache(maxsize=None)
def _heat_terms(m: int):
    """Expand (-(1/sinh r) d/dr)^m exp(-r^2/4t) as exp(-r^2/4t) * sum of monomials.

    A monomial (p, q, r, s) stands for rho^p cosh^q(rho) sinh^{-r}(rho) t^{-s}.
    """
    terms = {(0, 0, 0, 0): 1.0}
    for _ in range(m):
        new: dict = {}

        def add(key, c):
            new[key] = new.get(key, 0.0) + c

        for (p, q, r, s), c in terms.items():
            # d/drho of the monomial times exp(-rho^2/4t), then multiply by -1/sinh
            if p:
                add((p - 1, q, r + 1, s), -c * p)
            if q:
                add((p, q - 1, r, s), -c * q)
            if r:
                add((p, q + 1, r + 2, s), c * r)
            add((p + 1, q, r + 1, s + 1), c * 0.5)
        terms = {k: v for k, v in new.items() if v != 0.0}
    return tuple(terms.items())


@lru_cache(maxsize=None)
def _heat_series(m: int, t: float, K: int = 40):
    """Taylor coefficients in rho^2 of (-(1/sinh) d/drho)^m exp(-rho^2/4t)."""
    from scipy.special import bernoulli

    B = bernoulli(2 * K + 2)
    # rho / sinh(rho) = sum (2 - 2^{2k}) B_{2k} rho^{2k} / (2k)!
    inv = np.array([(2.0 - 2.0 ** (2 * k)) * B[2 * k] / math.factorial(2 * k) for k in range(K)])
    f = np.array([(-0.25 / t) ** k / math.factorial(k) for k in range(K)])
    for _ in range(m):
        # f' / rho in powers of rho^2, then times rho/sinh(rho), negated
        d = np.array([2.0 * (k + 1) * f[k + 1] for k in range(K - 1)] + [0.0])
        f = -np.convolve(d, inv)[:K]
    return f


def heat_kernel(rho, t: float, n: int = 3):
    """Heat kernel P_t(rho) on H^n for odd n = 2m + 1."""
    if n % 2 == 0 or n < 3:
        raise UnsupportedDimensionError("heat kernel implemented for odd n >= 3 only")
    if not t > 0:
        raise DomainError("t must be positive")
    m = (n - 1) // 2
    rho = np.abs(np.asarray(rho, dtype=float))
    pref = 2.0 ** (-m - 1) * math.pi ** (-m - 0.5) * t ** -0.5 * math.exp(-((n - 1) ** 2) * t / 4.0)
    out = np.empty(rho.shape)
    small = rho < min(0.5, 2.0 * math.sqrt(t))
    if np.any(small):
        coef = _heat_series(m, float(t))
        out[small] = np.polynomial.polynomial.polyval(rho[small] ** 2, coef)
    big = ~small
    if np.any(big):
        r = rho[big]
        lc, ls = log_cosh(r), log_sinh(r)
        acc = np.zeros_like(r)
        for (p, q, k, s), c in _heat_terms(m):
            acc += c * r**p * np.exp(q * lc - k * ls - r * r / (4.0 * t)) * t ** (-s)
        out[big] = acc
    return pref * out if out.ndim else float(pref * out)


def heat_mass(t: float, n: int = 3, rho_max: float = 40.0):
    """int P_t dV_H over B_H(0, rho_max) by 1-D adaptive quadrature."""
    edges = np.linspace(0.0, rho_max, 81)
    area = sphere_area(n)

    def f(r):
        return heat_kernel(r, t, n) * np.exp((n - 1) * log_sinh(np.maximum(r, 1e-300)))

    val, err = adaptive_gk(f, edges, abs_tol=1e-16, rel_tol=1e-14)
    return area * val, area * err


def heat_semigroup_defect(s: float, t: float, x, n_rho: int = 48, degree: int = 24, rho_max=None):
    """|int P_s(rho(y)) P_t(rho(y, x)) dV(y) - P_{s+t}(rho(x))| on a polar grid (n = 3)."""
    from numpy.polynomial.legendre import leggauss

    x = as_coords(x)
    n = x.size
    rx = float(geodesic_radius(x))
    xhat = x / np.linalg.norm(x) if rx > 0 else np.eye(n)[0]
    if rho_max is None:
        rho_max = rx + 2.0 + 6.0 * math.sqrt(max(s, t)) + (n - 1) * 2.0 * max(s, t)
    g, w = leggauss(n_rho)
    r = 0.5 * rho_max * (g + 1.0)
    wr = 0.5 * rho_max * w * np.sinh(r) ** (n - 1)
    sph = sphere_grid(n, degree)
    d = polar_distance(r[:, None], sph.nodes[None, :, :], rx, xhat)
    integrand = heat_kernel(r, s, n)[:, None] * heat_kernel(d, t, n)
    val = float(wr @ integrand @ sph.weights)
    return abs(val - float(heat_kernel(rx, s + t, n)))


def heat_resolvent_check(rho: float, k: float, n: int = 3):
    """|int_0^inf e^{((n-1)^2/4 - k^2) t} P_t(rho) dt - resolvent_kernel(rho, k)|.

    The time integral is done in log t, on a window outside which the integrand
    is below e^{-50} of its peak.
    """
    if not k > 0:
        raise DomainError("k must be positive")
    shift = (n - 1) ** 2 / 4.0 - k * k
    s_lo = math.log(rho * rho / 400.0)
    s_hi = math.log(100.0 / (k * k))
    edges = np.arange(s_lo, s_hi + 0.25, 0.25)

    def f(sv):
        tv = np.exp(sv)
        out = np.empty_like(tv)
        for idx, ti in np.ndenumerate(tv):
            out[idx] = heat_kernel(rho, ti, n) * math.exp(shift * ti) * ti
        return out

    mellin, _ = adaptive_gk(f, edges, abs_tol=1e-18, rel_tol=1e-12)
    direct = resolvent_kernel(rho, SpectralParam.damped(k, n)).value
    return abs(mellin - direct)


# ---------------------------------------------------------------------------
# far-zone asymptotics and radiation condition


def green_asymptotic_polar(rho_x: float, xhat, y, mu: float, n: int = 3, branch="outgoing",
                           phase_corrected: bool = True) -> AsymptoticEval:
    """Leading far-zone term of G(rho(x, y)) with x given in polar form.

    The exact kernel has cosh(rho)^{(n-3)/2+i mu}; replacing it by
    (2 sinh^2(rho/2))^{(n-3)/2+i mu} leaves the unimodular constant 2^{i mu} in
    front, which ``phase_corrected=False`` drops.
    """
    y = as_coords(y)
    ry = float(geodesic_radius(y))
    if rho_x < ry + 1.0:
        raise DomainError("green_asymptotic needs rho(x) >= rho(y) + 1")
    sp = spectral_param(mu, branch, n)
    z = sp.z
    expo = -2.0 * z - (n - 1)
    xhat = np.asarray(xhat, dtype=float)
    q = 1.0 - 2.0 * float(xhat @ y) + float(y @ y)
    log_lead = (
        log_green_prefactor(sp)
        - 0.5 * (n - 1) * math.log(2.0)
        + expo * float(log_cosh(0.5 * rho_x))
        + expo * float(log_cosh(0.5 * ry))
        + (-z - 0.5 * (n - 1)) * math.log(q)
    )
    if phase_corrected:
        log_lead += -z * math.log(2.0)
    leading = cmath.exp(log_lead) * q_integral_limit(z)
    scale = math.exp(-0.5 * (n + 1) * float(log_sinh(rho_x)))
    return AsymptoticEval(leading, scale)


def green_asymptotic(x, y, mu: float, n: int | None = None, branch="outgoing",
                     phase_corrected: bool = True) -> AsymptoticEval:
    x = as_coords(x)
    n = x.size if n is None else n
    rx = float(geodesic_radius(x))
    return green_asymptotic_polar(rx, x / np.linalg.norm(x), y, mu, n, branch, phase_corrected)


def asymptotic_ladder(y, mu: float, rhos=(8.0, 10.0, 12.0), n: int = 3, xhat=None,
                      branch="outgoing", phase_corrected: bool = True):
    """Scaled remainders |G(rho(x,y)) - leading| sinh^{(n+1)/2}(rho(x)) along a ladder.

    Returns (rhos, scaled_remainders, C) with C the fitted bound (the max).
    """
    y = as_coords(y)
    if xhat is None:
        xhat = np.eye(n)[0]
    xhat = np.asarray(xhat, dtype=float)
    ry = float(geodesic_radius(y))
    yhat = y / np.linalg.norm(y) if ry > 0 else xhat
    sp = spectral_param(mu, branch, n)
    scaled = []
    for r in rhos:
        d = float(polar_distance(r, xhat, ry, yhat))
        G = green_kernel(d, sp).value
        a = green_asymptotic_polar(r, xhat, y, mu, n, branch, phase_corrected)
        scaled.append(abs(G - a.leading) / a.remainder_bound_scale)
    scaled = np.array(scaled)
    return np.asarray(rhos, dtype=float), scaled, float(scaled.max())


def radiation_condition_coefficient(mu: float, n: int, branch="outgoing"):
    """c in the condition du/drho - c tanh(rho/2) u = small.

    Outgoing: c = i mu - (n-1)/2.  Ingoing: c = -(i mu + (n-1)/2).
    """
    branch = Branch(branch)
    if branch is Branch.OUTGOING:
        return 1j * mu - 0.5 * (n - 1)
    return -(1j * mu + 0.5 * (n - 1))


def _fd_step(rho: float) -> float:
    h = min(1e-3, rho * 1e-4)
    if h < 1e-12:
        raise DomainError("finite-difference step underflow")
    return h


def radiation_residual(rho: float, mu: float, branch="outgoing", n: int = 3, condition=None):
    """dG/drho - c tanh(rho/2) G for the kernel of ``branch`` against ``condition``.

    ``condition`` defaults to the kernel's own branch; pass the other branch for the
    mismatched (negative-control) pairing.
    """
    if rho < 1.0:
        raise DomainError("radiation residual is a far-zone quantity, need rho >= 1")
    condition = Branch(branch if condition is None else condition)
    sp = spectral_param(mu, branch, n)
    h = _fd_step(rho)
    G = {k: green_kernel(rho + k * h, sp).value for k in (-2, -1, 0, 1, 2)}
    dG = (-G[2] + 8.0 * G[1] - 8.0 * G[-1] + G[-2]) / (12.0 * h)
    c = radiation_condition_coefficient(mu, n, condition)
    return dG - c * math.tanh(0.5 * rho) * G[0]


def radial_ode_residual(rho: float, mu: float, branch="outgoing", n: int = 3, h: float = 1e-2):
    """Three-point FD residual of (d^2 + (n-1) coth d + (n-1)^2/4 + mu^2) G at rho."""
    sp = spectral_param(mu, branch, n)
    gm = green_kernel(rho - h, sp).value
    g0 = green_kernel(rho, sp).value
    gp = green_kernel(rho + h, sp).value
    d2 = (gp - 2.0 * g0 + gm) / (h * h)
    d1 = (gp - gm) / (2.0 * h)
    return d2 + (n - 1) / math.tanh(rho) * d1 + ((n - 1) ** 2 / 4.0 + mu * mu) * g0

"""Complex Gamma, Gauss 2F1 and the Legendre-Q type integral behind every kernel.

The central object is

    I(rho, z) = int_0^pi (cosh rho + cos t)^{(n-3)/2 - z} (sin t)^{2z} dt,

holomorphic in z for Re(2z) > -1.  On the critical line z = -+ i mu the factor
(sin t)^{2z} has modulus one but winds infinitely often at both endpoints, so
the end panels are integrated against t^{2z} analytically and only the smooth
cofactor is interpolated.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, DomainError, PoleError
from .geometry import log_cosh
from .quadrature import adaptive_gk, graded_edges

__all__ = [
    "SpectralParam",
    "complex_gamma",
    "complex_loggamma",
    "hyp2f1",
    "legendre_q_integral",
    "scaled_q_integral",
    "q_integral_limit",
    "green_prefactor",
    "log_green_prefactor",
]

# Godfrey's g = 607/128 Lanczos coefficients
_LANCZOS_G = 607.0 / 128.0
_LANCZOS = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _check_pole(w: complex):
    if w.imag == 0.0 and w.real <= 0.0 and w.real == math.floor(w.real):
        raise PoleError(f"Gamma has a pole at {w.real:g}")


def complex_loggamma(w) -> complex:
    """log Gamma(w) (some branch; exp() of it is Gamma)."""
    w = complex(w)
    _check_pole(w)
    if w.real < 0.5:
        # reflection: Gamma(w) Gamma(1-w) = pi / sin(pi w)
        return math.log(math.pi) - cmath.log(cmath.sin(math.pi * w)) - complex_loggamma(1.0 - w)
    w -= 1.0
    acc = _LANCZOS[0]
    for k in range(1, len(_LANCZOS)):
        acc += _LANCZOS[k] / (w + k)
    t = w + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (w + 0.5) * cmath.log(t) - t + cmath.log(acc)


def complex_gamma(w) -> complex:
    """Gamma(w) for complex w, Lanczos with reflection for Re w < 1/2."""
    return cmath.exp(complex_loggamma(w))


def hyp2f1(a, b, c, x, tol=1e-14, max_terms=100_000):
    """Gauss hypergeometric series sum_k (a)_k (b)_k / (c)_k x^k / k!  for |x| < 1.

    ``x`` may be an array; the series runs until every entry's tail estimate is
    below ``tol`` relative to its partial sum.
    """
    a, b, c = complex(a), complex(b), complex(c)
    if c.imag == 0.0 and c.real <= 0 and c.real == math.floor(c.real):
        raise PoleError("c must not be a nonpositive integer")
    x = np.asarray(x, dtype=complex)
    if np.any(np.abs(x) >= 1.0):
        raise DomainError("hyp2f1 series needs |x| < 1")
    total = np.ones_like(x)
    term = np.ones_like(x)
    ax = np.abs(x)
    for k in range(max_terms):
        term = term * ((a + k) * (b + k) / ((c + k) * (k + 1))) * x
        total = total + term
        ratio = abs((a + k + 1) * (b + k + 1) / ((c + k + 1) * (k + 2))) * ax
        tail = np.abs(term) * np.where(ratio < 1, ratio / np.maximum(1 - ratio, 1e-300), np.inf)
        if np.all((tail <= tol * np.abs(total)) | (term == 0)):
            return total if total.ndim else complex(total)
    raise AccuracyError("hyp2f1 series did not converge", partial=total)


@dataclass(frozen=True)
class SpectralParam:
    """Resolvent exponent z for (-Delta_H - (n-1)^2/4 + z^2)^{-1} in dimension n.

    z = k > 0 is the damped kernel, z = eps -+ i mu approaches the spectrum and
    z = -i mu (outgoing) / +i mu (ingoing) are the limiting-absorption kernels.
    """

    z: complex
    n: int
    mu: float | None = None

    def __post_init__(self):
        z = complex(self.z)
        object.__setattr__(self, "z", z)
        if self.n < 2:
            raise DomainError("dimension must be >= 2")
        for shift in ((self.n - 1) / 2.0, 0.5):
            w = shift + z
            if w.imag == 0.0 and w.real <= 0 and w.real == math.floor(w.real):
                raise PoleError(f"z = {z} hits a Gamma pole of the Green prefactor")

    @classmethod
    def damped(cls, k: float, n: int) -> "SpectralParam":
        return cls(complex(k), n)

    @classmethod
    def outgoing(cls, mu: float, n: int, eps: float = 0.0) -> "SpectralParam":
        return cls(complex(eps, -mu), n, mu)

    @classmethod
    def ingoing(cls, mu: float, n: int, eps: float = 0.0) -> "SpectralParam":
        return cls(complex(eps, mu), n, mu)

    @property
    def exponent(self) -> complex:
        """Power of (cosh rho + cos t) in the integrand."""
        return (self.n - 3) / 2.0 - self.z


def log_green_prefactor(sp: SpectralParam) -> complex:
    z = sp.z
    return (
        -0.5 * sp.n * math.log(2.0 * math.pi)
        + complex_loggamma((sp.n - 1) / 2.0 + z)
        - (z + 0.5) * math.log(2.0)
        - complex_loggamma(z + 0.5)
    )


def green_prefactor(sp: SpectralParam) -> complex:
    """A_{n,z} = (2 pi)^{-n/2} Gamma((n-1)/2 + z) / (2^{z+1/2} Gamma(z + 1/2))."""
    return cmath.exp(log_green_prefactor(sp))


def q_integral_limit(z) -> complex:
    """int_0^pi (sin t)^{2z} dt = sqrt(pi) Gamma(z + 1/2) / Gamma(z + 1)."""
    z = complex(z)
    return cmath.exp(0.5 * math.log(math.pi) + complex_loggamma(z + 0.5) - complex_loggamma(z + 1.0))


_END_NODES = 10
_DELTA = 1e-3


def _end_panel(g, delta, two_z):
    """int_0^delta t^{2z} g(t) dt for g even and analytic near 0.

    g is interpolated in u = (t/delta)^2 at Chebyshev points; the monomial moments
    int_0^1 s^{2z+2j} ds = 1/(2z+2j+1) are exact.
    """
    m = _END_NODES
    u = 0.5 * (1.0 - np.cos(np.pi * (np.arange(m) + 0.5) / m))
    vals = g(delta * np.sqrt(u))
    V = np.vander(u, m, increasing=True)
    moments = 1.0 / (two_z + 2.0 * np.arange(m) + 1.0)
    weights = np.linalg.solve(V.T, moments)
    return cmath.exp((two_z + 1.0) * math.log(delta)) * complex(weights @ vals)


def scaled_q_integral(rho: float, sp: SpectralParam, abs_tol=1e-14, rel_tol=1e-13):
    """J(rho, z) = int_0^pi (1 + cos t / cosh rho)^a (sin t)^{2z} dt, a = (n-3)/2 - z.

    This is I(rho, z) / cosh(rho)^a; it stays O(1) for all rho > 0.
    Returns (value, error_estimate).
    """
    rho = float(rho)
    if not rho > 0.0:
        raise DomainError("rho must be positive")
    z = sp.z
    if 2.0 * z.real <= -1.0:
        raise DomainError("need Re(2z) > -1 for the integral to converge")
    a = sp.exponent
    two_z = 2.0 * z
    sech = math.exp(-float(log_cosh(rho)))
    sh2 = 2.0 * math.sinh(0.5 * rho) ** 2 if rho < 1.0 else 0.0

    if rho < 1.0:
        def log_base_left(t):
            return np.log((sh2 + 2.0 * np.cos(0.5 * t) ** 2) * sech)

        def log_base_right(tau):
            return np.log((sh2 + 2.0 * np.sin(0.5 * tau) ** 2) * sech)
    else:
        def log_base_left(t):
            return np.log1p(np.cos(t) * sech)

        def log_base_right(tau):
            return np.log1p(-np.cos(tau) * sech)

    def left(t):
        return np.exp(a * log_base_left(t) + two_z * np.log(np.sin(t)))

    def right(tau):
        return np.exp(a * log_base_right(tau) + two_z * np.log(np.sin(tau)))

    def sinc_pow(t):
        # (sin t / t)^{2z}, even and analytic near 0
        s = np.where(t == 0.0, 1.0, np.sin(t) / np.where(t == 0.0, 1.0, t))
        return np.exp(two_z * np.log(s))

    d0 = _DELTA
    dpi = min(_DELTA, 0.25 * rho)
    end0 = _end_panel(lambda t: np.exp(a * log_base_left(t)) * sinc_pow(t), d0, two_z)
    endpi = _end_panel(lambda t: np.exp(a * log_base_right(t)) * sinc_pow(t), dpi, two_z)
    mid = 0.5 * math.pi
    v1, e1 = adaptive_gk(left, graded_edges(d0, mid, 1.6), abs_tol, rel_tol)
    v2, e2 = adaptive_gk(right, graded_edges(dpi, mid, 1.6), abs_tol, rel_tol)
    value = complex(end0 + endpi + v1 + v2)
    err = e1 + e2 + 1e-15 * (abs(end0) + abs(endpi))
    return value, err


def legendre_q_integral(rho: float, sp: SpectralParam, tol: float | None = None):
    """I(rho, z) with an absolute error estimate: returns (value, error).

    Raises AccuracyError if ``tol`` is given and the estimate exceeds it.
    """
    J, err = scaled_q_integral(rho, sp)
    scale = cmath.exp(sp.exponent * float(log_cosh(rho)))
    value = scale * J
    err = abs(scale) * err
    if tol is not None and err > tol:
        raise AccuracyError("legendre_q_integral above requested tolerance", value, err)
    return value, err

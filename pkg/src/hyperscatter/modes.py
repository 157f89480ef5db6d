"""Radial mode machinery: Jacobi functions, the radial ODE and Rellich's dichotomy."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import sph_harm_y

from .calculus import HelgasonWave, fd_convergence_order, laplace_beltrami
from .errors import DomainError, PoleError, UnsupportedDimensionError
from .geometry import as_coords, log_sinh
from .specfun import hyp2f1

__all__ = [
    "JacobiParams",
    "ModeCoefficient",
    "RadialSolution",
    "DichotomyResult",
    "jacobi_psi",
    "jacobi_residual",
    "helmholtz_psi",
    "radial_solution",
    "rellich_dichotomy",
    "spherical_harmonics",
    "incident_wave",
    "eigen_check",
    "mode_flux",
]

L_MAX = 32


@dataclass(frozen=True)
class JacobiParams:
    alpha: float
    beta: float
    lam: complex

    def __post_init__(self):
        lam = complex(self.lam)
        object.__setattr__(self, "lam", lam)
        c = 1.0 - 1j * lam
        if abs(c.imag) < 1e-14 and c.real <= 0 and abs(c.real - round(c.real)) < 1e-14:
            raise PoleError(f"lambda = {lam} lies in the excluded set -i, -2i, ...")

    @classmethod
    def helmholtz(cls, n: int, mu: float, sign: int = 1) -> "JacobiParams":
        """alpha = (n-2)/2, beta = -1/2, lambda = +-mu: the l = 0 Helmholtz radial equation."""
        return cls((n - 2) / 2.0, -0.5, sign * mu)


@dataclass(frozen=True)
class ModeCoefficient:
    l: int
    m: int
    rho: np.ndarray
    a_of_rho: np.ndarray
    n: int = 3

    @property
    def spherical_eigenvalue(self) -> int:
        return self.l * (self.l + self.n - 2)


def jacobi_psi(params: JacobiParams, rho):
    """Psi^lam_{a,b}(rho) = (2 sinh rho)^{i lam - a - b - 1} F((a+b+1-i lam)/2, (b-a+1-i lam)/2; 1-i lam; -sinh^{-2} rho)."""
    rho = np.asarray(rho, dtype=float)
    x = -np.exp(-2.0 * log_sinh(rho))
    if np.any(np.abs(x) > 0.9):
        raise DomainError("jacobi_psi series needs sinh^{-2}(rho) <= 0.9")
    a, b, lam = params.alpha, params.beta, params.lam
    il = 1j * lam
    F = hyp2f1((a + b + 1 - il) / 2.0, (b - a + 1 - il) / 2.0, 1.0 - il, x)
    pref = np.exp((il - a - b - 1.0) * (math.log(2.0) + log_sinh(rho)))
    return pref * F


def jacobi_residual(params: JacobiParams, rho: float, h: float = 1e-3):
    """Five-point FD residual of the Jacobi equation applied to jacobi_psi."""
    a, b, lam = params.alpha, params.beta, params.lam
    f = [complex(jacobi_psi(params, rho + k * h)) for k in (-2, -1, 0, 1, 2)]
    d1 = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h)
    d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
    return (
        d2
        + (2 * a + 1) / math.tanh(rho) * d1
        + (2 * b + 1) * math.tanh(rho) * d1
        + (lam**2 + (a + b + 1) ** 2) * f[2]
    )


def helmholtz_psi(n: int, mu: float, rho, sign: int = 1):
    return jacobi_psi(JacobiParams.helmholtz(n, mu, sign), rho)


@dataclass
class RadialSolution:
    n: int
    mu: float
    l: int
    sol: object

    def __call__(self, rho):
        y = self.sol.sol(np.asarray(rho, dtype=float))
        return y[0]

    def derivative(self, rho):
        return self.sol.sol(np.asarray(rho, dtype=float))[1]


def radial_solution(n: int, mu: float, l: int, rho_span, init, rtol=1e-11, atol=None):
    """Integrate a'' + (n-1) coth a' + ((n-1)^2/4 + mu^2 - l(l+n-2)/sinh^2) a = 0.

    ``init`` = (a(rho_start), a'(rho_start)) with rho_start = rho_span[0], which may
    exceed rho_span[1] (inward integration).  DOP853 with dense output; the
    default absolute tolerance tracks the sinh^{-(n-1)/2} decay.
    """
    r0, r1 = map(float, rho_span)
    if min(r0, r1) <= 0:
        raise DomainError("the radial equation is singular at rho = 0; start away from it")
    k2 = (n - 1) ** 2 / 4.0 + mu * mu
    ll = l * (l + n - 2)

    def rhs(r, y):
        return [y[1], -(n - 1) / math.tanh(r) * y[1] - (k2 - ll / math.sinh(r) ** 2) * y[0]]

    y0 = np.array(init, dtype=complex)
    if atol is None:
        # solutions shrink like exp(-(n-1) rho / 2); keep atol below the smallest value reached
        atol = 1e-3 * rtol * max(float(np.max(np.abs(y0))), 1e-300) * math.exp(-0.5 * (n - 1) * abs(r1 - r0))
    sol = solve_ivp(rhs, (r0, r1), y0, method="DOP853", rtol=rtol, atol=atol, dense_output=True)
    if not sol.success:
        raise DomainError(f"radial integration failed: {sol.message}")
    return RadialSolution(n, mu, l, sol)


@dataclass(frozen=True)
class DichotomyResult:
    verdict: str
    window_max: np.ndarray
    threshold: float

    @property
    def is_zero(self) -> bool:
        return self.verdict == "decays-strictly-faster"


def _windowed_max(n, mu, c1, c2, rho_range, samples_per_period=8):
    period = math.pi / mu
    lo, hi = rho_range
    n_win = int(math.floor((hi - lo) / period))
    maxima = []
    for k in range(n_win):
        r = lo + k * period + period * np.arange(samples_per_period) / samples_per_period
        a = 0j
        if c1 != 0:
            a = a + c1 * helmholtz_psi(n, mu, r, 1)
        if c2 != 0:
            a = a + c2 * helmholtz_psi(n, mu, r, -1)
        scaled = np.abs(a) * np.exp(0.5 * (n - 1) * log_sinh(r))
        maxima.append(float(np.max(scaled)) if np.ndim(scaled) else float(scaled))
    return np.array(maxima)


def rellich_dichotomy(n: int, mu: float, c1: complex, c2: complex, rho_range=(10.0, 30.0)):
    """Decide whether a = c1 Psi^mu + c2 Psi^{-mu} decays faster than sinh^{-(n-1)/2}.

    The windowed maxima of |a| sinh^{(n-1)/2} over windows of one interference
    period pi/mu are compared with a threshold calibrated on the pure mode
    Psi^mu: a quarter of its windowed level times min(|c1|, |c2|) over nonzero c.
    """
    c1, c2 = complex(c1), complex(c2)
    wm = _windowed_max(n, mu, c1, c2, rho_range)
    ref = float(np.min(_windowed_max(n, mu, 1.0, 0.0, rho_range)))
    nonzero = [abs(c) for c in (c1, c2) if c != 0]
    if not nonzero:
        return DichotomyResult("decays-strictly-faster", wm, 0.0)
    threshold = 0.25 * ref * min(nonzero)
    verdict = "does-not-decay-faster" if np.min(wm) > threshold else "decays-strictly-faster"
    return DichotomyResult(verdict, wm, threshold)


def spherical_harmonics(l: int, m: int, direction):
    """Real orthonormal Y_{l,m} on S^2 (n = 3 only), m in [-l, l]."""
    if not 0 <= abs(m) <= l:
        raise ValueError("need |m| <= l")
    if l > L_MAX:
        raise ValueError(f"degree beyond table (l_max = {L_MAX})")
    d = np.asarray(direction, dtype=float)
    if d.shape[-1] != 3:
        raise UnsupportedDimensionError("spherical harmonics implemented for n = 3")
    theta = np.arccos(np.clip(d[..., 2], -1.0, 1.0))
    phi = np.arctan2(d[..., 1], d[..., 0])
    Y = sph_harm_y(l, abs(m), theta, phi)
    if m == 0:
        return Y.real
    if m > 0:
        return math.sqrt(2.0) * (-1) ** m * Y.real
    return math.sqrt(2.0) * (-1) ** m * Y.imag


def incident_wave(mu: float, xi, x, n: int | None = None):
    """e_{2 mu, xi}(x), which solves (-Delta_H - (n-1)^2/4 - mu^2) e = 0."""
    xi = np.asarray(xi, dtype=float)
    if abs(np.linalg.norm(xi) - 1.0) > 1e-12:
        raise ValueError("xi must be a unit vector")
    if n is not None and xi.size != n:
        raise ValueError("dimension mismatch")
    return HelgasonWave(2.0 * mu, tuple(xi))(as_coords(x))


def eigen_check(lam: float, xi, x, steps=(0.04, 0.02, 0.01)):
    """FD test of -Delta_H e_{lam,xi} = eigenvalue * e.

    Returns a dict with errors against ((n-1)^2 + lam^2)/4 and against
    ((n-1)^2 + lam)/4 per step, plus the observed orders.
    """
    wave = HelgasonWave(lam, tuple(np.asarray(xi, dtype=float)))
    n = wave.n
    x = np.atleast_2d(as_coords(x))
    e = wave(x)
    errs_sq, errs_lin = [], []
    for h in steps:
        lap = -laplace_beltrami(wave, x, h)
        errs_sq.append(float(np.max(np.abs(lap - ((n - 1) ** 2 + lam**2) / 4.0 * e) / np.abs(e))))
        errs_lin.append(float(np.max(np.abs(lap - ((n - 1) ** 2 + lam) / 4.0 * e) / np.abs(e))))
    return {
        "steps": list(steps),
        "errors_lambda_squared": errs_sq,
        "errors_lambda_linear": errs_lin,
        "orders": fd_convergence_order(errs_sq, steps[0] / steps[1]).tolist(),
    }


def mode_flux(a_R: complex, R: float, n: int):
    """oint |a(R) Y|^2 dsigma_H for normalized Y, in two forms.

    Returns (|a|^2 sinh^{n-1} R, |a|^2 (2 cosh^2(R/2))^{n-1} tanh^{n-1}(R/2)).
    """
    a2 = abs(a_R) ** 2
    direct = a2 * math.exp((n - 1) * float(log_sinh(R)))
    chain = a2 * (2.0 * math.cosh(0.5 * R) ** 2) ** (n - 1) * math.tanh(0.5 * R) ** (n - 1)
    return direct, chain

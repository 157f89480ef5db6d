"""Poincare-ball geometry: distances, Mobius maps, measures and quadrature grids.

Points are stored in Euclidean ball coordinates.  Everything that has to work
far out in the ball (rho of order 10-30) should go through the polar helpers,
because 1 - |x| loses all its digits there.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln, roots_jacobi

from .errors import HyperscatterError

__all__ = [
    "BallPoint",
    "PolarPoint",
    "SphereGrid",
    "PolarGrid",
    "DegenerateInputError",
    "as_coords",
    "geodesic_radius",
    "to_polar",
    "to_ball",
    "mobius",
    "pairwise_distance",
    "polar_distance",
    "volume_weight",
    "surface_weight",
    "sphere_area",
    "log_sinh",
    "log_cosh",
    "sphere_grid",
    "polar_grid",
    "ray_ball_intervals",
    "translated_ball_grid",
]


class DegenerateInputError(HyperscatterError, ValueError):
    pass


@dataclass(frozen=True)
class BallPoint:
    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=float).reshape(-1)
        if c.size < 2:
            raise ValueError("BallPoint needs dimension n >= 2")
        if not np.all(np.isfinite(c)):
            raise ValueError("BallPoint coordinates must be finite")
        if np.dot(c, c) >= 1.0:
            raise ValueError(f"point {c} is not inside the open unit ball")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @property
    def n(self) -> int:
        return self.coords.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))

    @property
    def conformal_factor(self) -> float:
        return 2.0 / (1.0 - float(np.dot(self.coords, self.coords)))

    @classmethod
    def from_polar(cls, rho: float, direction) -> "BallPoint":
        return cls(to_ball(rho, direction))


@dataclass(frozen=True)
class PolarPoint:
    rho: float
    direction: np.ndarray

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError("geodesic radius must be nonnegative")
        d = np.array(self.direction, dtype=float).reshape(-1)
        nrm = np.linalg.norm(d)
        if abs(nrm - 1.0) > 1e-12:
            raise ValueError(f"direction must be a unit vector, |d| = {nrm}")
        d.setflags(write=False)
        object.__setattr__(self, "direction", d)

    @property
    def n(self) -> int:
        return self.direction.size

    def to_ball(self) -> BallPoint:
        return BallPoint(to_ball(self.rho, self.direction))


def as_coords(x) -> np.ndarray:
    if isinstance(x, BallPoint):
        return x.coords
    return np.asarray(x, dtype=float)


def log_sinh(x):
    """log(sinh x) for x > 0 without overflow."""
    x = np.asarray(x, dtype=float)
    return x + np.log1p(-np.exp(-2.0 * x)) - np.log(2.0)


def log_cosh(x):
    x = np.abs(np.asarray(x, dtype=float))
    return x + np.log1p(np.exp(-2.0 * x)) - np.log(2.0)


def geodesic_radius(x):
    """Distance from the origin, log((1+|x|)/(1-|x|)) = 2 artanh|x|."""
    r = np.linalg.norm(as_coords(x), axis=-1)
    return 2.0 * np.arctanh(r)


def to_polar(x) -> PolarPoint:
    c = as_coords(x)
    r = float(np.linalg.norm(c))
    if r == 0.0:
        d = np.zeros_like(c)
        d[0] = 1.0
        return PolarPoint(0.0, d)
    return PolarPoint(2.0 * np.arctanh(r), c / r)


def to_ball(rho, direction):
    """Ball coordinates tanh(rho/2) * direction, vectorized over leading axes."""
    rho = np.asarray(rho, dtype=float)
    return np.tanh(0.5 * rho)[..., None] * np.asarray(direction, dtype=float)


def mobius(a, x):
    """The isometry T_a, which swaps a and 0 (it is an involution)."""
    wrap = isinstance(a, BallPoint) or isinstance(x, BallPoint)
    a = as_coords(a)
    x = as_coords(x)
    diff = x - a
    aa = np.sum(a * a, axis=-1)
    xx = np.sum(x * x, axis=-1)
    xa = np.sum(x * a, axis=-1)
    dd = np.sum(diff * diff, axis=-1)
    den = 1.0 - 2.0 * xa + xx * aa
    if np.any(np.abs(den) < 1e-300):
        raise DegenerateInputError("Mobius denominator vanished")
    num = dd[..., None] * a - (1.0 - aa)[..., None] * diff
    out = num / den[..., None]
    if wrap and out.ndim == 1:
        return BallPoint(out)
    return out


def pairwise_distance(x, y):
    """Geodesic distance via sinh(rho/2) = |x-y| / sqrt((1-|x|^2)(1-|y|^2))."""
    x = as_coords(x)
    y = as_coords(y)
    d = np.linalg.norm(x - y, axis=-1)
    den = np.sqrt((1.0 - np.sum(x * x, axis=-1)) * (1.0 - np.sum(y * y, axis=-1)))
    return 2.0 * np.arcsinh(d / den)


def polar_distance(rho1, dir1, rho2, dir2):
    """Geodesic distance between points given in polar form.

    Uses sinh^2(d/2) = sinh^2((r1-r2)/2) + sinh r1 sinh r2 |w1-w2|^2/4, which is a
    sum of nonnegative terms and therefore accurate for near and far pairs alike.
    Broadcasts like numpy (directions carry a trailing axis).
    """
    rho1 = np.asarray(rho1, dtype=float)
    rho2 = np.asarray(rho2, dtype=float)
    chord2 = np.sum((np.asarray(dir1) - np.asarray(dir2)) ** 2, axis=-1)
    s2 = np.sinh(0.5 * (rho1 - rho2)) ** 2 + np.sinh(rho1) * np.sinh(rho2) * 0.25 * chord2
    return 2.0 * np.arcsinh(np.sqrt(s2))


def volume_weight(x, n: int | None = None):
    c = as_coords(x)
    n = c.shape[-1] if n is None else n
    return (2.0 / (1.0 - np.sum(c * c, axis=-1))) ** n


def sphere_area(n: int) -> float:
    """Area of the unit sphere S^{n-1} in R^n."""
    return float(2.0 * np.pi ** (n / 2) / np.exp(gammaln(n / 2)))


def surface_weight(R, n: int):
    """Hyperbolic area density on the geodesic sphere of radius R, per unit solid angle.

    Evaluated as 2^{n-1} cosh^{2n-2}(R/2) tanh^{n-1}(R/2), which is sinh^{n-1}(R).
    """
    R = np.asarray(R, dtype=float)
    if np.any(R <= 0):
        raise ValueError("R must be positive")
    logw = (n - 1) * (np.log(2.0) + 2.0 * log_cosh(0.5 * R) + np.log(np.tanh(0.5 * R)))
    return np.exp(logw)


@dataclass(frozen=True)
class SphereGrid:
    nodes: np.ndarray
    weights: np.ndarray
    degree: int

    @property
    def n(self) -> int:
        return self.nodes.shape[1]

    def __len__(self):
        return self.weights.size

    def integrate(self, values):
        return np.tensordot(np.asarray(values), self.weights, axes=([-1], [0]))


def _circle(m: int):
    phi = 2.0 * np.pi * (np.arange(m) + 0.5) / m
    nodes = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    return nodes, np.full(m, 2.0 * np.pi / m)


def sphere_grid(n: int, degree: int) -> SphereGrid:
    """Product rule on S^{n-1}, exact for polynomials of total degree <= ``degree``.

    The last coordinate uses Gauss-Jacobi nodes for the weight (1-s^2)^{(n-3)/2};
    the remaining factor recurses down to an equispaced circle.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    if n == 2:
        nodes, w = _circle(degree + 1)
        return SphereGrid(nodes, w, degree)
    k = degree // 2 + 1
    alpha = (n - 3) / 2.0
    s, ws = roots_jacobi(k, alpha, alpha)
    sub = sphere_grid(n - 1, degree)
    scale = np.sqrt(1.0 - s**2)
    nodes = np.concatenate(
        [
            (scale[:, None, None] * sub.nodes[None, :, :]).reshape(-1, n - 1),
            np.repeat(s, len(sub))[:, None],
        ],
        axis=1,
    )
    weights = (ws[:, None] * sub.weights[None, :]).reshape(-1)
    return SphereGrid(nodes, weights, degree)


@dataclass(frozen=True)
class PolarGrid:
    """Tensor quadrature rho x direction on the geodesic ball B_H(0, R0)."""

    rho: np.ndarray
    dirs: np.ndarray
    weights: np.ndarray
    R0: float
    n_rho: int = 0
    sphere: SphereGrid | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.dirs.shape[-1]

    def __len__(self):
        return self.weights.size

    @cached_property
    def points(self) -> np.ndarray:
        return to_ball(self.rho, self.dirs)

    def integrate(self, values):
        return np.tensordot(np.asarray(values), self.weights, axes=([-1], [0]))


def polar_grid(R0: float, n_rho: int, sphere: SphereGrid) -> PolarGrid:
    """Gauss-Legendre in rho on [0, R0] times a sphere rule, weight sinh^{n-1}(rho)."""
    if R0 <= 0:
        raise ValueError("R0 must be positive")
    if n_rho <= 0 or len(sphere) == 0:
        raise ValueError("polar grid needs nonzero node counts")
    x, w = leggauss(n_rho)
    rho = 0.5 * R0 * (x + 1.0)
    wr = 0.5 * R0 * w * np.sinh(rho) ** (sphere.n - 1)
    rr = np.repeat(rho, len(sphere))
    dd = np.tile(sphere.nodes, (n_rho, 1))
    ww = (wr[:, None] * sphere.weights[None, :]).reshape(-1)
    return PolarGrid(rr, dd, ww, float(R0), n_rho, sphere)


def ray_ball_intervals(center_rho: float, center_dir, radius: float, dirs):
    """Radial interval [s1, s2] where the ray from 0 along each direction meets B(c, radius).

    Rays that miss the ball get s1 = s2 = 0.  Uses the hyperbolic law of cosines
    cosh d = cosh s cosh rc - sinh s sinh rc cos(theta).
    """
    dirs = np.atleast_2d(dirs)
    if center_rho == 0.0:
        s2 = np.full(dirs.shape[0], float(radius))
        return np.zeros_like(s2), s2
    cos_t = dirs @ np.asarray(center_dir, dtype=float)
    A = np.cosh(center_rho)
    B = np.sinh(center_rho) * cos_t
    C = np.cosh(radius)
    # A cosh s - B sinh s = C  <=>  (A-B) e^{2s} - 2C e^s + (A+B) = 0
    a2 = A - B
    disc = C * C - (A * A - B * B)
    ok = disc >= 0
    sq = np.sqrt(np.where(ok, disc, 0.0))
    e_hi = (C + sq) / a2
    # the smaller root in a cancellation-free form
    e_lo = (A + B) / (C + sq)
    s_hi = np.where(ok, np.log(e_hi), 0.0)
    s_lo = np.where(ok, np.log(np.maximum(e_lo, 1e-300)), 0.0)
    inside = center_rho <= radius
    s1 = np.where(inside, 0.0, np.maximum(s_lo, 0.0))
    s2 = np.where(ok | inside, s_hi, 0.0)
    s1 = np.where(s2 > s1, s1, 0.0)
    s2 = np.where(s2 > s1, s2, 0.0)
    return s1, s2


def _cap_directions(axis, theta_max: float, degree: int):
    """Directions within angle theta_max of ``axis`` with their solid-angle weights.

    theta = theta_max (1 - tau^2) with Gauss-Legendre in tau, which smooths the
    square-root behaviour of ray lengths at the tangent cone.
    """
    n = axis.size
    m = degree // 2 + 1
    g, w = leggauss(m)
    tau = 0.5 * (g + 1.0)
    wt = 0.5 * w
    theta = theta_max * (1.0 - tau**2)
    w_theta = wt * 2.0 * theta_max * tau * np.sin(theta) ** (n - 2)
    ring = sphere_grid(n - 1, degree)
    # orthonormal complement of axis
    q, _ = np.linalg.qr(np.column_stack([axis, np.eye(n)]))
    perp = q[:, 1:n] * np.sign(q[:, 0] @ axis)
    ring_dirs = ring.nodes @ perp.T
    dirs = np.cos(theta)[:, None, None] * axis + np.sin(theta)[:, None, None] * ring_dirs[None, :, :]
    weights = w_theta[:, None] * ring.weights[None, :]
    return dirs.reshape(-1, n), weights.reshape(-1)


def translated_ball_grid(x0, center, radius: float, n_rho: int, sphere: SphereGrid):
    """Quadrature for integrands supported in B(center, radius), polar about x0.

    Nodes are w-coordinates polar about the origin, mapped by the isometry T_{x0};
    on each ray the Gauss-Legendre rule is fitted to the exact entry/exit radii so
    the support boundary is never straddled.  When x0 lies outside the ball only
    the cone of rays that meet it is sampled, at the angular degree of ``sphere``.
    Returns (s, dirs, weights, points) where s = rho(x0, point).
    """
    x0 = as_coords(x0)
    center = as_coords(center)
    c_w = mobius(x0, center) if np.any(x0) else center
    c_w = as_coords(c_w)
    crho = float(geodesic_radius(c_w))
    cdir = c_w / np.linalg.norm(c_w) if crho > 0 else np.eye(sphere.n)[0]
    if crho > radius:
        theta_max = float(np.arcsin(min(1.0, np.sinh(radius) / np.sinh(crho))))
        sdirs, sw = _cap_directions(cdir, theta_max, sphere.degree)
    else:
        sdirs, sw = sphere.nodes, sphere.weights
    s1, s2 = ray_ball_intervals(crho, cdir, radius, sdirs)
    x, w = leggauss(n_rho)
    half = 0.5 * (s2 - s1)
    s = s1[:, None] + half[:, None] * (x[None, :] + 1.0)
    wt = half[:, None] * w[None, :] * np.sinh(s) ** (sphere.n - 1) * sw[:, None]
    dirs = np.repeat(sdirs[:, None, :], n_rho, axis=1)
    s = s.reshape(-1)
    wt = wt.reshape(-1)
    dirs = dirs.reshape(-1, sphere.n)
    keep = wt > 0
    s, wt, dirs = s[keep], wt[keep], dirs[keep]
    w_pts = to_ball(s, dirs)
    pts = mobius(x0, w_pts) if np.any(x0) else w_pts
    return s, dirs, wt, as_coords(pts)

"""Geometry of the hyperplane process in d-dimensional hyperbolic space.

Intensity landmarks for dimension d:

    gamma_c = sqrt(pi) (d-1) Gamma((d+1)/2) / Gamma(d/2)
    c_d     = Gamma(d/2) / (2 sqrt(pi) Gamma((d+1)/2))
    a       = gamma c_d / 2 + (1 - d)/4 = (c_d / 2)(gamma - gamma_c)

so c_d * gamma_c = (d-1)/2 and a > 0 exactly in the supercritical regime
gamma > gamma_c.  The invariant hyperplane measure is normalized so that the
hyperplanes hitting a geodesic segment of length L have measure 2 c_d L;
consequently the hyperplanes hitting a geodesic triangle have measure c_d
times its perimeter, and the probability that two points at distances s, t
from the origin (subtending angle theta) both lie in the zero cell is
exp(-gamma c_d (s + t + chord)) with chord the side joining them.

Points and hyperplanes live on the hyperboloid {<X,X>_L = -1} in Lorentz
space R^(d,1): a point at distance r in unit direction u embeds as
(sinh(r) u, cosh(r)); the hyperplane at distance p with closest-point
direction u has spacelike unit normal (cosh(p) u, sinh(p)), and a point is
on the origin's side exactly when its Lorentz product with that normal is
non-positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


def critical_intensity(d: int) -> float:
    """Intensity below which the zero cell is unbounded with positive
    probability (and its expected volume infinite)."""
    if d < 2:
        raise DomainError("dimension must be at least 2")
    return math.sqrt(math.pi) * (d - 1) * math.exp(
        math.lgamma(0.5 * (d + 1)) - math.lgamma(0.5 * d))


def segment_constant(d: int) -> float:
    """c_d: half the hyperplane measure per unit segment length."""
    if d < 2:
        raise DomainError("dimension must be at least 2")
    return 0.5 / math.sqrt(math.pi) * math.exp(
        math.lgamma(0.5 * d) - math.lgamma(0.5 * (d + 1)))


def sphere_surface(d: int) -> float:
    """Surface measure omega_d of the unit sphere S^(d-1)."""
    return 2.0 * math.pi ** (0.5 * d) / math.gamma(0.5 * d)


@dataclass(frozen=True)
class ModelParams:
    """Dimension and intensity of the hyperplane process."""

    d: int
    gamma: float

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 2:
            raise DomainError("dimension must be an integer >= 2")
        if not (math.isfinite(self.gamma) and self.gamma > 0.0):
            raise DomainError("intensity gamma must be positive and finite")

    @property
    def gamma_c(self) -> float:
        return critical_intensity(self.d)

    @property
    def c_d(self) -> float:
        return segment_constant(self.d)

    @property
    def a(self) -> float:
        return 0.5 * self.gamma * self.c_d + 0.25 * (1 - self.d)

    @property
    def supercritical(self) -> bool:
        return self.gamma > self.gamma_c


def _unit(u, d):
    u = np.asarray(u, dtype=float)
    if u.shape != (d,):
        raise DomainError(f"direction must have shape ({d},)")
    norm = float(np.linalg.norm(u))
    if abs(norm - 1.0) > 1e-9:
        raise DomainError("direction must be a unit vector")
    return u / norm


@dataclass(frozen=True, eq=False)
class HPoint:
    """Point at hyperbolic distance r from the origin in direction u."""

    r: float
    u: np.ndarray

    def __post_init__(self):
        if self.r < 0.0:
            raise DomainError("radius must be non-negative")
        object.__setattr__(self, "u", _unit(self.u, self.u.shape[0]))

    def embed(self) -> np.ndarray:
        """Hyperboloid coordinates (sinh(r) u, cosh(r)), Lorentz norm -1."""
        return np.append(math.sinh(self.r) * self.u, math.cosh(self.r))


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """Totally geodesic hypersurface at distance p from the origin."""

    p: float
    u: np.ndarray

    def __post_init__(self):
        if self.p < 0.0:
            raise DomainError("distance must be non-negative")
        object.__setattr__(self, "u", _unit(self.u, self.u.shape[0]))

    def normal(self) -> np.ndarray:
        """Spacelike unit Lorentz normal (cosh(p) u, sinh(p))."""
        return np.append(math.cosh(self.p) * self.u, math.sinh(self.p))


def lorentz_dot(x: np.ndarray, y: np.ndarray) -> float:
    """Bilinear form with signature (+, ..., +, -)."""
    return float(np.dot(x[:-1], y[:-1]) - x[-1] * y[-1])


def _dist_from_parts(s, t, sin_sq_half):
    # cosh(c) - 1 = 2 sinh^2((s-t)/2) + 2 sinh(s) sinh(t) sin^2(theta/2);
    # both terms are non-negative so nothing cancels, and
    # arcosh(1 + q) = log1p(q + sqrt(q (q + 2))) stays exact as q -> 0
    q = 2.0 * np.sinh(0.5 * (s - t)) ** 2 \
        + 2.0 * np.sinh(s) * np.sinh(t) * sin_sq_half
    return np.log1p(q + np.sqrt(q * (q + 2.0)))


def chord_distance(s, t, theta):
    """Geodesic distance between points at radii s, t subtending angle theta.

    Accepts scalars or broadcastable numpy arrays.  Exact at coincidence:
    the law of cosines is rearranged so the returned distance is built from
    non-negative terms instead of a difference of cosh products.
    """
    return _dist_from_parts(s, t, np.sin(0.5 * theta) ** 2)


def triangle_hitting_measure(params: ModelParams, s, t, theta):
    """Measure of hyperplanes meeting the geodesic triangle with one vertex
    at the origin: c_d times the perimeter."""
    return params.c_d * (s + t + chord_distance(s, t, theta))


def two_point_probability(params: ModelParams, x: HPoint, y: HPoint) -> float:
    """P(x and y both lie in the zero cell)."""
    # sin^2(theta/2) = |u_x - u_y|^2 / 4 for unit directions; no arccos
    sin_sq_half = 0.25 * float(np.sum((x.u - y.u) ** 2))
    chord = float(_dist_from_parts(x.r, y.r, sin_sq_half))
    return math.exp(-params.gamma * params.c_d * (x.r + y.r + chord))


def _sinh_power_series(n: int, x: float) -> float:
    # sinh(r)^n = sum_k c_k r^(n+2k); the c_k come from convolving the
    # sinh series with itself n - 1 times.  24 terms hold the truncation
    # below 1e-16 for x < 0.8 and any n that arises from a dimension.
    terms = 24
    base = [1.0 / math.factorial(2 * k + 1) for k in range(terms)]
    coef = base[:]
    for _ in range(n - 1):
        coef = [math.fsum(coef[j] * base[k - j] for j in range(k + 1))
                for k in range(terms)]
    x_sq = x * x
    total, power = 0.0, x ** (n + 1)
    for k in range(terms):
        total += coef[k] * power / (n + 2 * k + 1)
        power *= x_sq
    return total


def sinh_power_integral(n: int, x: float) -> float:
    """int_0^x sinh(r)^n dr.

    The textbook recurrence subtracts two O(x^(n-1)) terms to produce an
    O(x^(n+1)) result, so below x = 0.8 the power series is used instead.
    """
    if n < 0:
        raise DomainError("power must be non-negative")
    if n == 0:
        return x
    if x < 0.8:
        return _sinh_power_series(n, x)
    sh, ch = math.sinh(x), math.cosh(x)
    if n == 1:
        return ch - 1.0
    return (sh ** (n - 1) * ch - (n - 1) * sinh_power_integral(n - 2, x)) / n


def cosh_power_integral(n: int, x: float) -> float:
    """int_0^x cosh(r)^n dr."""
    if n < 0:
        raise DomainError("power must be non-negative")
    if n == 0:
        return x
    sh, ch = math.sinh(x), math.cosh(x)
    if n == 1:
        return sh
    return (ch ** (n - 1) * sh + (n - 1) * cosh_power_integral(n - 2, x)) / n


def ball_volume(d: int, R: float) -> float:
    """Volume of the hyperbolic ball of radius R."""
    if d < 2:
        raise DomainError("dimension must be at least 2")
    if R < 0.0:
        raise DomainError("radius must be non-negative")
    return sphere_surface(d) * sinh_power_integral(d - 1, R)

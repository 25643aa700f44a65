"""Gamma-function machinery and spherical functions.

log_gamma uses the Lanczos approximation (g = 7, 9 coefficients), which is
accurate to about 1e-13 relative over the range exercised here, together
with one-step recurrence near the imaginary axis and the reflection formula
in the left half-plane.  abs_gamma_sq exposes |Gamma(x+iy)|^2 through the
real part of log_gamma, which is what the spectral integrands consume; they
always combine several log-gamma terms before a single exp, so individual
magnitudes may underflow without harming the ratio.

spherical_function evaluates the zonal spherical function phi_lambda(r) of
d-dimensional hyperbolic space from its one-dimensional integral
representation

    phi_lambda(r) = C1(d) sinh(r)^(2-d)
                    int_0^r cos(lambda s) (cosh r - cosh s)^((d-3)/2) ds,
    C1(d) = 2^((d-1)/2) Gamma(d/2) / (sqrt(pi) Gamma((d-1)/2)),

by tanh-sinh quadrature: the integrand has an inverse-square-root endpoint
singularity at s = r when d = 2 and is smooth for d >= 3, and the same rule
handles both uniformly.  The difference cosh r - cosh s is computed as
2 sinh((r+s)/2) sinh((r-s)/2) with the exact endpoint gap supplied by the
quadrature rule, so no precision is lost as s -> r.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import DomainError
from .quad import integrate_tanh_sinh

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_log_gamma(z: complex) -> complex:
    # valid for Re(z) >= 0.5
    x = z - 1.0
    acc = _LANCZOS[0]
    for k in range(1, 9):
        acc += _LANCZOS[k] / (x + k)
    t = x + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (x + 0.5) * cmath.log(t) - t + cmath.log(acc)


def log_gamma(z: complex) -> complex:
    """Principal-branch log of the gamma function.

    Raises DomainError at the poles (z a non-positive integer).  On the
    reflected half-plane Re(z) < -0.5 the imaginary part may differ from
    the principal value by a multiple of 2*pi; the real part, hence
    |Gamma(z)|, is always correct.
    """
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == int(z.real):
        raise DomainError(f"log_gamma pole at z = {z.real:g}")
    if z.real >= 0.5:
        return _lanczos_log_gamma(z)
    if z.real > -0.5:
        return log_gamma(z + 1.0) - cmath.log(z)
    # reflection: log Gamma(z) = log(pi / sin(pi z)) - log Gamma(1 - z)
    return cmath.log(math.pi) - cmath.log(cmath.sin(math.pi * z)) \
        - _lanczos_log_gamma(1.0 - z)


def abs_gamma_sq(x: float, y: float) -> float:
    """|Gamma(x + iy)|^2 = exp(2 Re log Gamma(x + iy))."""
    return math.exp(2.0 * log_gamma(complex(x, y)).real)


def beta_fn(x: float, y: float) -> float:
    """Euler beta function for positive real arguments."""
    if x <= 0.0 or y <= 0.0:
        raise DomainError("beta_fn needs positive arguments")
    return math.exp(math.lgamma(x) + math.lgamma(y) - math.lgamma(x + y))


def spherical_function(d: int, lam: float, r: float,
                       rel_tol: float = 1e-9) -> float:
    """Zonal spherical function phi_lambda(r) on d-dimensional space.

    phi is 1 at r = 0, real for real lambda, and bounded by 1 in modulus.
    For d = 3 it reduces to sin(lambda r) / (lambda sinh r).
    """
    if d < 2:
        raise DomainError("dimension must be at least 2")
    if r < 0.0:
        raise DomainError("radius must be non-negative")
    if r == 0.0:
        return 1.0
    power = 0.5 * (d - 3)
    c1 = math.exp(0.5 * (d - 1) * math.log(2.0) + math.lgamma(0.5 * d)
                  - 0.5 * math.log(math.pi) - math.lgamma(0.5 * (d - 1)))

    def integrand(s, gap_lo, gap_hi):
        diff = 2.0 * np.sinh(0.5 * (r + s)) * np.sinh(0.5 * gap_hi)
        return np.cos(lam * s) * diff ** power

    res = integrate_tanh_sinh(integrand, 0.0, r, rel_tol=rel_tol,
                              f_with_gaps=True)
    return c1 * math.sinh(r) ** (2 - d) * res.value

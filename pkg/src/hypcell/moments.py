"""Volume moments of the zero cell, by three independent routes.

Let V be the volume of the zero cell (intersected with the ball of radius R
when R is finite), gamma the intensity, u = gamma c_d, and
a = (c_d/2)(gamma - gamma_c).  The routes to E[V^2]:

  spectral  K(d, gamma) * int_0^inf R_a(lam) P_d(lam) dlam with
                R_a(lam) = |Gamma(a + i lam/2)|^6
                           / |Gamma(a + (d+1)/2 + i lam/2)|^6,
                P_d(lam) = |Gamma((d-1)/2 + i lam)|^2 / |Gamma(i lam)|^2,
                K(d, gamma) = gamma^3 pi^(d-3) Gamma(d/2)^2 / 2^(d+5).
            P_d is the Plancherel density of the spherical transform; the
            closed form below for d = 3 pins this normalization.

  residue   for odd d = 2k+1 the integral collapses, by closing a
            Mellin-Barnes contour, to
                2 pi^(2k-1) Gamma(k+1/2)^2 (gamma/4)^3
                * sum_m Res_{s = -(a+m)} P_k(s)/Q_k(s),
                P_k(s) = prod_{j<k} (j^2/4 - s^2),
                Q_k(s) = prod_{l<=k} ((a+l)^2 - s^2)^3,
            the poles being triple; each residue is extracted numerically
            on a small circle.

  direct    4 pi^((2d-1)/2) / (Gamma(d/2) Gamma((d-1)/2)) times the triple
            integral over (s, t, theta) of
                exp(-u (s + t + chord)) sinh^(d-1)(s) sinh^(d-1)(t)
                sin^(d-2)(theta),
            chord = arcosh(cosh s cosh t - sinh s sinh t cos theta).
            For R = inf the integration square is truncated at
            S* = ln(1/rel_tol) / (2u - (d-1)) + 10; the margin
            2u - (d-1) = 2 c_d (gamma - gamma_c) is positive exactly in
            the supercritical regime, where the two-point probability makes
            the radial marginal decay at that rate.

The first moment is omega_d int_0^R exp(-2 u r) sinh^(d-1)(r) dr, with the
closed value omega_d 2^(-d) B(c_d (gamma - gamma_c), d) at R = inf serving
as an independent check in the tests.

Scaling limits: gamma^(2d) E[V^2] tends to the Euclidean constant C_d as
gamma -> inf, and (gamma - gamma_c)^3 E[V^2] tends to K_d as
gamma -> gamma_c from above, with

  C_d = 2^(4d) pi^((4d-3)/2) Gamma(d+3/2)/Gamma((3d+3)/2)
        * Gamma((d+1)/2)^(2d+3) / Gamma(d/2)^(2d),
  K_d = pi^(d+1)/2^(d-2) * (d-1) * Gamma((d+1)/2)^2 / Gamma(d/2)^4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError
from .hypgeo import ModelParams, critical_intensity, sphere_surface
from .quad import TailSpec, integrate_adaptive, integrate_geometric, \
    integrate_semi_infinite, residue_at, tanh_sinh_batch
from .specfun import log_gamma, spherical_function

_SUBCRITICAL_MSG = ("the requested moment diverges at or below the critical "
                    "intensity; pass a finite truncation radius R")


@dataclass
class MomentReport:
    """One computed moment with provenance of the numeric route."""

    method: str
    value: float
    error_estimate: float
    evaluations: int
    d: int
    gamma: float
    R: float = math.inf

    def to_dict(self) -> dict:
        return {
            "method": self.method, "value": self.value,
            "error_estimate": self.error_estimate,
            "evaluations": self.evaluations, "d": self.d,
            "gamma": self.gamma,
            "R": self.R if math.isfinite(self.R) else "inf",
        }


def _log_sinh(r):
    """log(sinh(r)) without overflow, elementwise; -inf at r = 0.

    expm1 keeps the small-r branch exact: exp(-2r) rounds to 1.0 below
    r ~ 1e-16 and would send log1p(-exp(-2r)) to -inf long before r = 0.
    """
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        return r + np.log(-np.expm1(-2.0 * r)) - math.log(2.0)


def tail_horizon(params: ModelParams, rel_tol: float) -> float:
    """Truncation radius S* beyond which the radial mass of the two-point
    integrand is below rel_tol, from the decay margin 2 gamma c_d - (d-1)."""
    margin = 2.0 * params.gamma * params.c_d - (params.d - 1)
    if margin <= 0.0:
        raise DomainError(_SUBCRITICAL_MSG)
    return math.log(1.0 / rel_tol) / margin + 10.0


class SpectralIntegrand:
    """R_a(lam) * P_d(lam), evaluated entirely in log space.

    Vanishes at lam = 0 (double zero from the Plancherel density) and
    decays like lam^-(2d+4); prefactor holds K(d, gamma).
    """

    def __init__(self, params: ModelParams):
        self.params = params
        d, g = params.d, params.gamma
        self.prefactor = g ** 3 * math.pi ** (d - 3) \
            * math.gamma(0.5 * d) ** 2 / 2.0 ** (d + 5)
        self.tail_exponent = 2.0 * d + 4.0

    def log_value(self, lam: float) -> float:
        a = self.params.a
        d = self.params.d
        b = a + 0.5 * (d + 1)
        return (6.0 * (log_gamma(complex(a, 0.5 * lam)).real
                       - log_gamma(complex(b, 0.5 * lam)).real)
                + 2.0 * (log_gamma(complex(0.5 * (d - 1), lam)).real
                         - log_gamma(complex(0.0, lam)).real))

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        flat = lam.ravel()
        out = np.empty(flat.shape)
        for i, x in enumerate(flat):
            out[i] = 0.0 if x == 0.0 else math.exp(self.log_value(float(x)))
        return out.reshape(lam.shape)


def second_moment_spectral(params: ModelParams,
                           rel_tol: float = 1e-9) -> MomentReport:
    """Second moment of the zero cell volume via the spectral integral."""
    if not params.supercritical:
        raise DomainError(_SUBCRITICAL_MSG)
    integrand = SpectralIntegrand(params)
    a = params.a
    if a < 0.05:
        # near-critical: substitute lam = 2 a u so the knee sits at u ~ 1
        def g(u):
            return 2.0 * a * integrand(2.0 * a * u)
        tail = TailSpec(integrand.tail_exponent, max(40.0, 15.0 / a))
        res = integrate_semi_infinite(g, tail, rel_tol)
    else:
        tail = TailSpec(integrand.tail_exponent, max(80.0, 30.0 * (1.0 + a)))
        res = integrate_semi_infinite(integrand, tail, rel_tol)
    return MomentReport("spectral", integrand.prefactor * res.value,
                        integrand.prefactor * res.abs_error_estimate,
                        res.evaluations, params.d, params.gamma)


@dataclass
class ResidueSpec:
    """Contour for one pole of the collapsed integrand."""

    center: float
    radius: float
    order: int = 3


def residue_poles(params: ModelParams) -> list[ResidueSpec]:
    """Poles -(a+m), m = 0..k, with circle radii at 0.45 times the distance
    to the nearest other pole of Q_k."""
    if params.d % 2 == 0 or params.d < 3:
        raise DomainError("residue route needs odd dimension d >= 3")
    if not params.supercritical:
        raise DomainError(_SUBCRITICAL_MSG)
    k = (params.d - 1) // 2
    a = params.a
    specs = []
    for m in range(k + 1):
        dist = min(1.0, 2.0 * a + m)
        specs.append(ResidueSpec(-(a + m), 0.45 * dist))
    return specs


def second_moment_residue(params: ModelParams) -> MomentReport:
    """Second moment via the closed residue form (odd d only)."""
    specs = residue_poles(params)
    k = (params.d - 1) // 2
    a = params.a

    def f(s):
        num = 1.0 + 0.0j
        for j in range(k):
            num *= 0.25 * j * j - s * s
        den = 1.0 + 0.0j
        for l in range(k + 1):
            den *= ((a + l) ** 2 - s * s) ** 3
        return num / den

    total = 0.0 + 0.0j
    for spec in specs:
        total += residue_at(f, complex(spec.center), spec.radius)
    if abs(total.imag) > 1e-10 * max(abs(total.real), 1e-300):
        raise ConvergenceError(
            f"residue sum failed the reality check: {total!r}", best=total)
    pref = 2.0 * math.pi ** (2 * k - 1) * math.gamma(k + 0.5) ** 2 \
        * (params.gamma / 4.0) ** 3
    value = pref * total.real
    err = pref * max(abs(total.imag), 1e-14 * abs(total.real))
    return MomentReport("residue", value, err, 192 * len(specs),
                        params.d, params.gamma)


def _chord_sections(params: ModelParams, s: float, t_vec, count, rel_tol):
    """Angular integral at fixed (s, t), taken over the chord length c.

    Substituting c = chord(s, t, theta) turns
        int_0^pi exp(-u c) sin^(d-2)(theta) dtheta
    into
        int_{|s-t|}^{s+t} exp(-u c) sin^(d-3)(theta(c)) sinh(c) dc
            / (sinh s sinh t),
    with sin^2(theta) = (cosh c - cosh|s-t|)(cosh(s+t) - cosh c)
    / (sinh s sinh t)^2.  The theta form packs nearly all mass into a layer
    of width exp(-min(s, t)) at theta = 0; in c the integrand varies on an
    O(1) scale, with only algebraic endpoint factors that the gap-aware
    tanh-sinh rule absorbs.  Differences of cosh are expanded as
    2 sinh((c + c0)/2) sinh((c - c0)/2) to keep the endpoint factors exact.
    """
    d = params.d
    u = params.gamma * params.c_d
    pw = 0.5 * (d - 3)
    t_vec = np.asarray(t_vec, dtype=float)
    c_lo = np.abs(s - t_vec)
    c_hi = s + t_vec
    log_st = _log_sinh(s) + _log_sinh(t_vec)

    def f(c, gap_lo, gap_hi):
        count[0] += c.size
        logf = -u * c + _log_sinh(c)
        if d != 3:
            log_sin_sq = (math.log(4.0)
                          + _log_sinh(c_lo[:, None] + 0.5 * gap_lo)
                          + _log_sinh(0.5 * gap_lo)
                          + _log_sinh(c_hi[:, None] - 0.5 * gap_hi)
                          + _log_sinh(0.5 * gap_hi)
                          - 2.0 * log_st[:, None])
            logf = logf + pw * log_sin_sq
        return np.exp(logf)

    vals, _, _ = tanh_sinh_batch(f, c_lo, c_hi, rel_tol)
    return vals * np.exp(-u * (s + t_vec) + (d - 2) * log_st)


def second_moment_direct(params: ModelParams, R: float = math.inf,
                         rel_tol: float = 1e-6) -> MomentReport:
    """Second moment via direct 3-d quadrature of the two-point function.

    Iterated quadrature: adaptive in s, adaptive in t with the square split
    along the diagonal (the chord section has a kink at t = s), batched
    tanh-sinh in the chord variable innermost.
    """
    if math.isinf(R):
        S = tail_horizon(params, rel_tol)
    else:
        if not R > 0.0:
            raise DomainError("truncation radius must be positive")
        S = R
    d = params.d
    inner_tol = rel_tol / 3.0
    count = [0]

    def middle(s):
        f_t = lambda tv: _chord_sections(params, s, tv, count, inner_tol)
        low = integrate_adaptive(f_t, 0.0, s, rel_tol=inner_tol,
                                 max_panels=3000)
        high = integrate_adaptive(f_t, s, S, rel_tol=inner_tol,
                                  max_panels=3000)
        return low.value + high.value

    def outer_f(sv):
        return np.array([middle(s) for s in np.asarray(sv)])

    outer = integrate_adaptive(outer_f, 0.0, S, rel_tol=inner_tol,
                               max_panels=3000)
    pref = 4.0 * math.pi ** (0.5 * (2 * d - 1)) / (
        math.gamma(0.5 * d) * math.gamma(0.5 * (d - 1)))
    value = pref * outer.value
    err = pref * outer.abs_error_estimate + abs(value) * 2.0 * inner_tol
    if math.isinf(R):
        err += abs(value) * rel_tol  # truncation allowance
    return MomentReport("direct", value, err, count[0],
                        d, params.gamma, R)


def truncated_second_moment_critical(d: int, R: float,
                                     rel_tol: float = 1e-6) -> MomentReport:
    """E[V(ball R)^2] at the critical intensity; grows like R^3."""
    if not (math.isfinite(R) and R > 0.0):
        raise DomainError("critical truncated moment needs finite R > 0")
    params = ModelParams(d, critical_intensity(d))
    report = second_moment_direct(params, R=R, rel_tol=rel_tol)
    report.method = "critical-truncated"
    return report


def first_moment(params: ModelParams, R: float = math.inf,
                 rel_tol: float = 1e-9) -> MomentReport:
    """Expected cell volume omega_d int_0^R e^(-2 u r) sinh^(d-1)(r) dr."""
    d = params.d
    u = params.gamma * params.c_d

    def f(r):
        return np.exp(-2.0 * u * r + (d - 1) * _log_sinh(r))

    omega = sphere_surface(d)
    if math.isinf(R):
        margin = 2.0 * u - (d - 1)
        if margin <= 0.0:
            raise DomainError(_SUBCRITICAL_MSG)
        cutoff = math.log(1.0 / rel_tol) / margin + 10.0
        res = integrate_semi_infinite(f, TailSpec(2.0, cutoff), rel_tol)
    else:
        if not R > 0.0:
            raise DomainError("truncation radius must be positive")
        res = integrate_geometric(f, 0.0, R, rel_tol)
    return MomentReport("quadrature", omega * res.value,
                        omega * res.abs_error_estimate, res.evaluations,
                        d, params.gamma, R)


def euclidean_second_moment(d: int, gamma: float) -> float:
    """Second zero-cell moment of the Euclidean hyperplane process, equal to
    the gamma -> inf limit constant over gamma^(2d)."""
    if d < 2:
        raise DomainError("dimension must be at least 2")
    if not gamma > 0.0:
        raise DomainError("intensity must be positive")
    log_c = (4 * d * math.log(2.0)
             + 0.5 * (4 * d - 3) * math.log(math.pi)
             + math.lgamma(d + 1.5) - math.lgamma(1.5 * (d + 1))
             + (2 * d + 3) * math.lgamma(0.5 * (d + 1))
             - 2 * d * math.lgamma(0.5 * d))
    return math.exp(log_c - 2 * d * math.log(gamma))


def euclidean_limit_constant(d: int) -> float:
    """C_d = lim_{gamma -> inf} gamma^(2d) E[V^2]."""
    return euclidean_second_moment(d, 1.0)


def critical_divergence_constant(d: int) -> float:
    """K_d = lim_{gamma -> gamma_c+} (gamma - gamma_c)^3 E[V^2]."""
    if d < 2:
        raise DomainError("dimension must be at least 2")
    return math.exp((d + 1) * math.log(math.pi) - (d - 2) * math.log(2.0)
                    + math.log(d - 1) + 2.0 * math.lgamma(0.5 * (d + 1))
                    - 4.0 * math.lgamma(0.5 * d))


def spherical_transform_closed(params: ModelParams, lam: float) -> float:
    """Spherical transform of exp(-gamma c_d r), in closed gamma-ratio form:
    (gamma/4) pi^((d-2)/2) Gamma(d/2)
    |Gamma(a + i lam/2)|^2 / |Gamma(a + (d+1)/2 + i lam/2)|^2."""
    if not params.supercritical:
        raise DomainError(_SUBCRITICAL_MSG)
    a = params.a
    b = a + 0.5 * (params.d + 1)
    log_ratio = 2.0 * (log_gamma(complex(a, 0.5 * lam)).real
                       - log_gamma(complex(b, 0.5 * lam)).real)
    return 0.25 * params.gamma * math.pi ** (0.5 * (params.d - 2)) \
        * math.gamma(0.5 * params.d) * math.exp(log_ratio)


def spherical_transform_numeric(params: ModelParams, lam: float,
                                rel_tol: float = 1e-7) -> float:
    """Same transform by outer quadrature against spherical_function."""
    if not params.supercritical:
        raise DomainError(_SUBCRITICAL_MSG)
    d = params.d
    u = params.gamma * params.c_d
    margin = u - 0.5 * (d - 1)  # envelope decay of phi * sinh^(d-1) * e^-ur

    def f(r):
        r = np.asarray(r, dtype=float)
        phis = np.array([spherical_function(d, lam, float(x)) for x in r])
        return np.exp(-u * r + (d - 1) * _log_sinh(r)) * phis

    cutoff = math.log(1.0 / rel_tol) / margin + 10.0
    res = integrate_semi_infinite(f, TailSpec(2.0, cutoff), rel_tol)
    return sphere_surface(d) * res.value

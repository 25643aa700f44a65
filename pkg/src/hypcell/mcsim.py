"""Monte Carlo simulation of the hyperplane process.

A hyperplane is parametrized by its distance p from the origin and the unit
direction u of its closest point.  In these coordinates the invariant
measure normalized to 2 c_d per unit segment length is

    kappa_d cosh^(d-1)(p) dp sigma(du),
    kappa_d = c_d (d-1) Gamma((d-1)/2) / pi^((d-1)/2),

so the process restricted to hyperplanes meeting the ball of radius R is
Poisson with mean gamma kappa_d omega_d int_0^R cosh^(d-1)(p) dp.  Radial
draws invert the cosh-power CDF (analytically for d = 2, by bracketed
Newton otherwise); directions are normalized Gaussians.  The hyperplane
(p, u) separates the origin from the point at distance r in direction e
exactly when

    sinh(r) cosh(p) <e, u>  >  cosh(r) sinh(p).

Reproducibility: every realization block uses its own Philox stream keyed
(seed, block index) with a fixed block size and draw order, so estimates
are bit-identical for a given seed no matter how work would be partitioned.

Estimators:

  segment_hitting_rate       unit-intensity mean number of hyperplanes
                             separating the endpoints of a segment; the
                             exact rate is 2 c_d r, which calibrates the
                             kappa_d normalization.
  estimate_truncated_moments first and second moments of the cell volume
                             within a ball, each realization scoring the
                             cell by two independent uniform point sets so
                             the product V1*V2 is conditionally unbiased
                             for the squared volume.
  two_point_is_estimator     importance-sampled second moment using the
                             two-point probability exp(-gamma c_d
                             (s+t+chord)).  The radial proposal density is
                             proportional to exp(-gamma c_d r) sinh^(d-1) r
                             on [0, R*], truncated at the direct route's
                             tail horizon when R is infinite (the untruncated
                             proposal is not normalizable unless
                             gamma c_d > d-1); weights are bounded by the
                             squared proposal normalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .hypgeo import HPoint, Hyperplane, ModelParams, ball_volume, \
    chord_distance, sphere_surface
from .moments import tail_horizon

_BLOCK = 8192
_MASK = (1 << 64) - 1


def _stream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed & _MASK, index]))


@dataclass
class MCEstimate:
    mean: float
    std_error: float
    n: int


@dataclass
class MomentEstimates:
    first: MCEstimate
    second: MCEstimate


@dataclass(eq=False)
class ProcessSample:
    """One realization of the process within the ball of radius R."""

    params: ModelParams
    R: float
    hyperplanes: list[Hyperplane]
    seed: int

    def arrays(self):
        n = len(self.hyperplanes)
        p = np.array([h.p for h in self.hyperplanes])
        u = np.array([h.u for h in self.hyperplanes]).reshape(
            n, self.params.d)
        return p, u


def _cosh_power_integral(n, x):
    if n == 0:
        return x
    sh, ch = np.sinh(x), np.cosh(x)
    if n == 1:
        return sh
    return (ch ** (n - 1) * sh + (n - 1) * _cosh_power_integral(n - 2, x)) / n


def _sinh_power_integral(n, x):
    if n == 0:
        return x
    sh, ch = np.sinh(x), np.cosh(x)
    if n == 1:
        return ch - 1.0
    return (sh ** (n - 1) * ch - (n - 1) * _sinh_power_integral(n - 2, x)) / n


def _exp_sinh_integral(n, beta, p):
    """int_0^p exp(-beta r) sinh(r)^n dr via the binomial expansion."""
    p = np.asarray(p, dtype=float)
    total = np.zeros_like(p)
    for j in range(n + 1):
        c = n - 2 * j - beta
        coef = math.comb(n, j) * (-1.0) ** j * 0.5 ** n
        if abs(c) < 1e-12:
            total = total + coef * p
        else:
            total = total + coef * np.expm1(c * p) / c
    return total


def _invert_monotone(F, dF, target, hi, iters=60):
    """Solve F(x) = target for increasing F on [0, hi], elementwise."""
    lo_b = np.zeros_like(target)
    hi_b = np.full_like(target, hi)
    x = 0.5 * hi_b
    for _ in range(iters):
        fx = F(x) - target
        hi_b = np.where(fx > 0.0, x, hi_b)
        lo_b = np.where(fx > 0.0, lo_b, x)
        slope = dF(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            cand = x - fx / slope
        inside = (cand > lo_b) & (cand < hi_b) & np.isfinite(cand)
        x = np.where(inside, cand, 0.5 * (lo_b + hi_b))
        if np.max(hi_b - lo_b, initial=0.0) < 1e-13 * (1.0 + hi):
            break
    return x


def _radii_from_cosh_density(u01, d, R):
    """Inverse CDF of the density cosh^(d-1) on [0, R]."""
    total = _cosh_power_integral(d - 1, R)
    target = u01 * total
    if d == 2:
        return np.arcsinh(target)
    return _invert_monotone(lambda x: _cosh_power_integral(d - 1, x),
                            lambda x: np.cosh(x) ** (d - 1), target, R)


def _radii_from_sinh_density(u01, d, R):
    """Inverse CDF of the volume-radial density sinh^(d-1) on [0, R]."""
    total = _sinh_power_integral(d - 1, R)
    target = u01 * total
    if d == 2:
        return np.arccosh(1.0 + target)
    return _invert_monotone(lambda x: _sinh_power_integral(d - 1, x),
                            lambda x: np.sinh(x) ** (d - 1), target, R)


def _unit_directions(rng, m, d):
    z = rng.standard_normal((m, d))
    norms = np.linalg.norm(z, axis=1)
    bad = norms < 1e-300
    if np.any(bad):
        z[bad, 0] = 1.0
        norms[bad] = 1.0
    return z / norms[:, None]


def hyperplane_intensity(params: ModelParams, R: float) -> float:
    """Mean number of process hyperplanes meeting the ball of radius R."""
    d = params.d
    kappa = params.c_d * (d - 1) * math.exp(
        math.lgamma(0.5 * (d - 1)) - 0.5 * (d - 1) * math.log(math.pi))
    return params.gamma * kappa * sphere_surface(d) \
        * float(_cosh_power_integral(d - 1, R))


def _draw_realizations(params: ModelParams, R: float, rng, m: int):
    """Hyperplane draws for m realizations: counts, distances, directions."""
    mu = hyperplane_intensity(params, R)
    counts = rng.poisson(mu, m)
    total = int(counts.sum())
    p = _radii_from_cosh_density(rng.random(total), params.d, R)
    dirs = _unit_directions(rng, total, params.d)
    return counts, p, dirs


def sample_process(params: ModelParams, R: float, seed: int) -> ProcessSample:
    """Draw one realization of the process within the ball of radius R."""
    if not (math.isfinite(R) and R > 0.0):
        raise DomainError("sampling needs a finite ball radius R > 0")
    rng = _stream(seed, 0)
    _, p, dirs = _draw_realizations(params, R, rng, 1)
    planes = [Hyperplane(float(pi), di) for pi, di in zip(p, dirs)]
    return ProcessSample(params, R, planes, seed)


def _separates(r, point_dirs, p, plane_dirs):
    """Separation indicator matrix between points and hyperplanes."""
    dots = point_dirs @ plane_dirs.T
    lhs = np.sinh(r)[:, None] * np.cosh(p)[None, :] * dots
    return lhs > (np.cosh(r)[:, None] * np.sinh(p)[None, :])


def membership(x: HPoint, sample: ProcessSample) -> bool:
    """Whether x lies in the zero cell of the sampled process."""
    if x.r > sample.R * (1.0 + 1e-12):
        raise DomainError("point lies outside the sampled ball")
    p, u = sample.arrays()
    if p.size == 0:
        return True
    sep = _separates(np.array([x.r]), x.u[None, :], p, u)
    return not bool(sep.any())


def segment_hitting_rate(d: int, r: float, n: int, seed: int) -> MCEstimate:
    """Empirical mean number of unit-intensity hyperplanes separating the
    endpoints of a segment of length r; the exact value is 2 c_d r."""
    if d < 2 or not r > 0.0 or n < 1:
        raise DomainError("need d >= 2, r > 0, n >= 1")
    params = ModelParams(d, 1.0)
    sh_r, ch_r = math.sinh(r), math.cosh(r)
    acc = acc_sq = 0.0
    for block, start in enumerate(range(0, n, _BLOCK)):
        m = min(_BLOCK, n - start)
        rng = _stream(seed, block)
        counts, p, dirs = _draw_realizations(params, r, rng, m)
        sep = sh_r * np.cosh(p) * dirs[:, 0] > ch_r * np.sinh(p)
        idx = np.repeat(np.arange(m), counts)
        per_real = np.bincount(idx, weights=sep.astype(float), minlength=m)
        acc += float(per_real.sum())
        acc_sq += float((per_real ** 2).sum())
    mean = acc / n
    var = max(acc_sq - n * mean * mean, 0.0) / max(n - 1, 1)
    return MCEstimate(mean, math.sqrt(var / n), n)


def estimate_truncated_moments(params: ModelParams, R: float, n_real: int,
                               n_pts: int, seed: int) -> MomentEstimates:
    """MC estimates of E[V] and E[V^2] for the cell volume within the ball
    of radius R, via two independent point sets per realization."""
    if not (math.isfinite(R) and R > 0.0):
        raise DomainError("truncated moments need finite R > 0")
    if n_real < 2 or n_pts < 1:
        raise DomainError("need n_real >= 2 and n_pts >= 1")
    d = params.d
    vol = ball_volume(d, R)
    s1 = s1_sq = s2 = s2_sq = 0.0
    for i in range(n_real):
        rng = _stream(seed, i)
        _, p, dirs = _draw_realizations(params, R, rng, 1)
        radii = _radii_from_sinh_density(rng.random(2 * n_pts), d, R)
        pdirs = _unit_directions(rng, 2 * n_pts, d)
        if p.size:
            outside = _separates(radii, pdirs, p, dirs).any(axis=1)
            inside = ~outside
        else:
            inside = np.ones(2 * n_pts, dtype=bool)
        v1 = vol * float(inside[:n_pts].mean())
        v2 = vol * float(inside[n_pts:].mean())
        first = 0.5 * (v1 + v2)
        second = v1 * v2
        s1 += first
        s1_sq += first * first
        s2 += second
        s2_sq += second * second
    def finish(s, ssq):
        mean = s / n_real
        var = max(ssq - n_real * mean * mean, 0.0) / (n_real - 1)
        return MCEstimate(mean, math.sqrt(var / n_real), n_real)
    return MomentEstimates(finish(s1, s1_sq), finish(s2, s2_sq))


def two_point_is_estimator(params: ModelParams, R: float, n: int,
                           seed: int) -> MCEstimate:
    """Importance-sampled second moment from the two-point probability."""
    if n < 2:
        raise DomainError("need n >= 2")
    d = params.d
    u = params.gamma * params.c_d
    if math.isinf(R):
        r_eff = tail_horizon(params, 1e-8)
    else:
        if not R > 0.0:
            raise DomainError("truncation radius must be positive")
        r_eff = R
    z_norm = float(_exp_sinh_integral(d - 1, u, np.array(r_eff)))
    w_bound = (z_norm * sphere_surface(d)) ** 2

    def radial(u01):
        target = u01 * z_norm
        return _invert_monotone(
            lambda x: _exp_sinh_integral(d - 1, u, x),
            lambda x: np.exp(-u * x) * np.sinh(x) ** (d - 1), target, r_eff)

    acc = acc_sq = 0.0
    for block, start in enumerate(range(0, n, _BLOCK)):
        m = min(_BLOCK, n - start)
        rng = _stream(seed, block)
        s = radial(rng.random(m))
        t = radial(rng.random(m))
        ux = _unit_directions(rng, m, d)
        uy = _unit_directions(rng, m, d)
        cos_angle = np.clip(np.einsum("ij,ij->i", ux, uy), -1.0, 1.0)
        theta = np.arccos(cos_angle)
        w = w_bound * np.exp(-u * chord_distance(s, t, theta))
        acc += float(w.sum())
        acc_sq += float((w ** 2).sum())
    mean = acc / n
    var = max(acc_sq - n * mean * mean, 0.0) / (n - 1)
    return MCEstimate(mean, math.sqrt(var / n), n)

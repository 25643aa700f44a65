"""Deterministic quadrature and numerical contour integration.

Engines:

  integrate_adaptive      Gauss-Kronrod (G7, K15) panels, worst-first bisection.
  integrate_tanh_sinh     double-exponential rule for endpoint singularities.
  integrate_semi_infinite finite adaptive part plus analytic power-law tail
                          bound; the cutoff grows until the tail bound is
                          below rel_tol * |value|.
  integrate_3d            iterated adaptive quadrature over a box, innermost
                          over the third (angular) variable.
  residue_at              trapezoid rule on a circle around a pole, with a
                          doubled-node agreement check.

Integrands are evaluated on numpy arrays: f(x) with x of shape (n,) must
return shape (n,).  integrate_3d calls f(s, t, theta) with broadcastable
arguments.  Everything is sequential and deterministic: identical inputs
produce identical results bit for bit.

Error estimates are honest but conservative; the nested-rule difference
|K15 - G7| is reported unshrunk, and analytic tail bounds are added in full.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from heapq import heappush, heappop

import numpy as np

from .errors import ConvergenceError, DomainError

# Kronrod-15 abscissae (positive half) and weights, with embedded Gauss-7.
_XGK = np.array([
    0.9914553711208126392068547, 0.9491079123427585245261897,
    0.8648644233597690727897128, 0.7415311855993944398638648,
    0.5860872354676911302941448, 0.4058451513773971669066064,
    0.2077849550078984676006894, 0.0,
])
_WGK = np.array([
    0.0229353220105292249637320, 0.0630920926299785532907007,
    0.1047900103222501838398763, 0.1406532597155259187451896,
    0.1690047266392679028265834, 0.1903505780647854099132564,
    0.2044329400752988924141620, 0.2094821410847278280129992,
])
_WG = np.array([
    0.1294849661688696932706114, 0.2797053914892766679014678,
    0.3818300505051189449503698, 0.4179591836734693877551020,
])

# Full 15-node layout, ordered left to right.
_NODES = np.concatenate([-_XGK[:7], [0.0], _XGK[:7][::-1]])
_WK15 = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[:7][::-1]])
_WG7 = np.zeros(15)
_WG7[1:14:2] = np.concatenate([_WG[:3], [_WG[3]], _WG[:3][::-1]])

_TINY = 1e-300


@dataclass
class QuadResult:
    value: float
    abs_error_estimate: float
    evaluations: int


@dataclass
class TailSpec:
    """Power-law tail model |f(x)| <= C x**(-exponent) beyond the cutoff.

    exponent must exceed 1; it is a lower bound on the decay rate, so
    faster-decaying (e.g. exponential) integrands are admissible and simply
    get an over-conservative tail bound.
    """

    exponent: float
    cutoff: float

    def __post_init__(self):
        if not self.exponent > 1.0:
            raise DomainError("tail exponent must exceed 1 for a finite tail")
        if not self.cutoff > 0.0:
            raise DomainError("tail cutoff must be positive")


def _panel(f, lo, hi):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    fx = np.asarray(f(mid + half * _NODES), dtype=float)
    k15 = half * float(fx @ _WK15)
    g7 = half * float(fx @ _WG7)
    return k15, abs(k15 - g7)


def integrate_adaptive(f, lo, hi, rel_tol=1e-9, abs_tol=0.0, max_panels=2000):
    """Adaptive Gauss-Kronrod integration of f over [lo, hi]."""
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError("integrate_adaptive needs finite endpoints")
    if hi == lo:
        return QuadResult(0.0, 0.0, 0)
    wmin = 1e-14 * (1.0 + abs(lo) + abs(hi))
    val, err = _panel(f, lo, hi)
    evals = 15
    heap = [(-err, 0, lo, hi, val, err)]
    done = []  # panels too narrow to split further
    counter = 1
    total_val, total_err = val, err
    while True:
        if total_err <= max(rel_tol * abs(total_val), abs_tol, _TINY):
            break
        if not heap:
            break
        if len(heap) + len(done) >= max_panels:
            best = QuadResult(total_val, total_err, evals)
            raise ConvergenceError(
                f"adaptive quadrature hit the {max_panels}-panel budget "
                f"(error estimate {total_err:.3e})", best=best)
        _, _, a, b, v, e = heappop(heap)
        if b - a < wmin:
            done.append((a, b, v, e))
            continue
        m = 0.5 * (a + b)
        v1, e1 = _panel(f, a, m)
        v2, e2 = _panel(f, m, b)
        evals += 30
        total_val += (v1 + v2) - v
        total_err += (e1 + e2) - e
        heappush(heap, (-e1, counter, a, m, v1, e1))
        heappush(heap, (-e2, counter + 1, m, b, v2, e2))
        counter += 2
    panels = done + [(a, b, v, e) for _, _, a, b, v, e in heap]
    panels.sort()
    value = math.fsum(p[2] for p in panels)
    error = math.fsum(p[3] for p in panels)
    if not heap and error > max(rel_tol * abs(value), abs_tol, _TINY):
        raise ConvergenceError(
            "adaptive quadrature stalled on panels at resolution limit",
            best=QuadResult(value, error, evals))
    return QuadResult(value, error, evals)


def tanh_sinh_batch(f, lo, hi, rel_tol=1e-9, max_level=12):
    """Double-exponential rule applied to a batch of intervals at once.

    lo and hi are arrays of shape (B,); all rows share one node grid in the
    transformed variable.  The integrand is called as f(x, gap_lo, gap_hi)
    with arrays of shape (B, n), where the gaps are exact distances to the
    row endpoints, and must return values of shape (B, n).  Returns
    (values (B,), errors (B,), evaluations).
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    half = 0.5 * (hi - lo)
    live = half > 0.0
    t_max = 4.0

    def level_sum(ts):
        tau = 0.5 * math.pi * np.sinh(ts)
        sech = 1.0 / np.cosh(tau)
        frac = sech * np.exp(-np.abs(tau))  # (1 - |tanh tau|)
        gap = half[:, None] * frac[None, :]
        far = 2.0 * half[:, None] - gap
        gap_hi = np.where(tau[None, :] >= 0, gap, far)
        gap_lo = np.where(tau[None, :] >= 0, far, gap)
        x = lo[:, None] + gap_lo
        w = 0.5 * math.pi * np.cosh(ts) * sech * sech
        fx = np.asarray(f(x, gap_lo, gap_hi), dtype=float)
        return half * (fx @ w), x.size

    h = 1.0
    js = np.arange(-int(t_max / h), int(t_max / h) + 1)
    s, n = level_sum(js * h)
    evals = n
    total = h * s
    err = np.abs(total)
    for level in range(1, max_level + 1):
        h *= 0.5
        js = np.arange(-int(t_max / h) - 1, int(t_max / h) + 2)
        ts = js * h
        ts = ts[np.abs(js) % 2 == 1]
        s_new, n = level_sum(ts)
        evals += n
        new_total = 0.5 * total + h * s_new
        err = np.abs(new_total - total)
        total = new_total
        scale = np.maximum(np.abs(total), _TINY)
        if level >= 3 and np.all(err[live] <= 0.5 * rel_tol * scale[live]):
            break
    else:
        raise ConvergenceError(
            f"batched tanh-sinh rule did not converge in {max_level} levels",
            best=QuadResult(float(total.sum()), float(err.sum()), evals))
    total = np.where(live, total, 0.0)
    return total, np.where(live, err, 0.0), evals


def integrate_tanh_sinh(f, lo, hi, rel_tol=1e-9, max_level=12,
                        f_with_gaps=False):
    """Double-exponential quadrature on [lo, hi].

    Tolerates integrable endpoint singularities; no node ever touches an
    endpoint.  With f_with_gaps=True the integrand is called as
    f(x, gap_lo, gap_hi) where the gaps are the exact distances to the
    endpoints, so f can evaluate cancellation-prone differences stably.
    """
    if hi <= lo:
        return QuadResult(0.0, 0.0, 0)
    half = 0.5 * (hi - lo)
    t_max = 4.0

    def level_sum(ts):
        tau = 0.5 * math.pi * np.sinh(ts)
        # gap to the near endpoint: half*(1 - |tanh tau|) = half*sech*e^-|tau|
        # each gap is formed directly: subtracting the small one from the
        # interval width would round the far gap's complement to zero
        sech = 1.0 / np.cosh(tau)
        gap = half * sech * np.exp(-np.abs(tau))
        far = 2.0 * half - gap
        gap_hi = np.where(tau >= 0, gap, far)
        gap_lo = np.where(tau >= 0, far, gap)
        x = lo + gap_lo
        w = half * 0.5 * math.pi * np.cosh(ts) * sech * sech
        keep = w > 1e-290
        if not np.any(keep):
            return 0.0, 0
        x, w = x[keep], w[keep]
        if f_with_gaps:
            fx = np.asarray(f(x, gap_lo[keep], gap_hi[keep]), dtype=float)
        else:
            fx = np.asarray(f(x), dtype=float)
        return float(fx @ w), x.size

    h = 1.0
    js = np.arange(-int(t_max / h), int(t_max / h) + 1)
    s, n = level_sum(js * h)
    evals = n
    total = h * s
    err = abs(total)
    for level in range(1, max_level + 1):
        h *= 0.5
        js = np.arange(-int(t_max / h) - 1, int(t_max / h) + 2)
        ts = js * h
        ts = ts[np.abs(js) % 2 == 1]  # new nodes only
        s_new, n = level_sum(ts)
        evals += n
        new_total = 0.5 * total + h * s_new
        err = abs(new_total - total)
        total = new_total
        if level >= 3 and err <= 0.5 * rel_tol * max(abs(total), _TINY):
            return QuadResult(total, err, evals)
    raise ConvergenceError(
        f"tanh-sinh rule did not converge in {max_level} levels "
        f"(last change {err:.3e})", best=QuadResult(total, err, evals))


def integrate_geometric(f, lo, hi, rel_tol=1e-9, first=1.0):
    """Adaptive integration over [lo, hi] split at geometric breakpoints.

    When the domain is many orders of magnitude wider than a feature pinned
    to the lower endpoint, every node of the first panels can miss the
    feature, and bisection then converges against a smooth-looking remainder
    without ever finding it.  Segments growing by a fixed factor from
    lo + first guarantee each scale gets its own panels.
    """
    edges = [lo]
    e = lo + first
    while e < hi:
        edges.append(e)
        e = lo + (e - lo) * 8.0
    edges.append(hi)
    value = 0.0
    error = 0.0
    evals = 0
    for a, b in zip(edges[:-1], edges[1:]):
        res = integrate_adaptive(f, a, b, rel_tol=rel_tol)
        value += res.value
        error += res.abs_error_estimate
        evals += res.evaluations
    return QuadResult(value, error, evals)


def integrate_semi_infinite(f, tail: TailSpec, rel_tol=1e-9):
    """Integrate f over [0, inf) given a power-law tail model.

    The finite part [0, cutoff] is integrated on geometric segments; the
    remainder is bounded by |f(cutoff)| * cutoff / (exponent - 1) and folded
    into the error estimate.  The cutoff doubles until that bound is below
    rel_tol*|value|.
    """
    cutoff = tail.cutoff
    evals = 0
    for _ in range(16):
        finite = integrate_geometric(f, 0.0, cutoff, rel_tol=0.5 * rel_tol)
        evals += finite.evaluations
        f_cut = abs(float(np.asarray(f(np.array([cutoff])), dtype=float)[0]))
        evals += 1
        tail_bound = f_cut * cutoff / (tail.exponent - 1.0)
        if tail_bound <= rel_tol * max(abs(finite.value), _TINY):
            return QuadResult(finite.value,
                              finite.abs_error_estimate + tail_bound, evals)
        cutoff *= 2.0
    raise ConvergenceError(
        "semi-infinite tail bound failed to drop below tolerance; "
        "the integrand decays more slowly than the declared exponent",
        best=QuadResult(finite.value,
                        finite.abs_error_estimate + tail_bound, evals))


def residue_at(f, center, radius, nodes=64):
    """Residue of f at an enclosed pole via the trapezoid rule on a circle.

    Exponentially accurate for f analytic on the contour.  The node count is
    doubled once; disagreement beyond tolerance means the circle likely
    encloses another pole or touches one, and raises ConvergenceError.
    """
    if radius <= 0.0:
        raise DomainError("contour radius must be positive")

    def trap(n):
        acc = 0.0 + 0.0j
        peak = 0.0
        for j in range(n):
            w = complex(math.cos(2.0 * math.pi * j / n),
                        math.sin(2.0 * math.pi * j / n))
            fw = f(center + radius * w)
            peak = max(peak, abs(fw))
            acc += fw * w
        return acc * radius / n, peak

    res_n, _ = trap(nodes)
    res_2n, peak = trap(2 * nodes)
    disagreement = abs(res_2n - res_n)
    # a residue of zero (f analytic) leaves only roundoff, whose scale is
    # set by |f| on the contour, not by the residue
    noise = 1e-12 * radius * peak
    if disagreement > max(1e-9 * abs(res_2n), noise, 1e-280):
        raise ConvergenceError(
            f"contour residue not stable under node doubling "
            f"(change {disagreement:.3e}); radius {radius:.3e} is suspect",
            best=res_2n)
    return res_2n

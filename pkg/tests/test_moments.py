"""Moment routes against frozen reference values and each other.

The reference numbers were produced before this module existed, by an
independent high-precision implementation (mpmath, 25 significant digits):
the closed rational forms for odd d, a Mellin-Barnes residue sum with
its contour accuracy verified by digit-doubling, and one-dimensional
reference quadratures for the transforms.  They are frozen here as
literals so the test does not share code with what it checks.
"""

import math

import numpy as np
import pytest

from hypcell import (
    DomainError,
    ModelParams,
    critical_divergence_constant,
    critical_intensity,
    euclidean_limit_constant,
    euclidean_second_moment,
    first_moment,
    second_moment_direct,
    second_moment_residue,
    second_moment_spectral,
    spherical_transform_closed,
    spherical_transform_numeric,
    sphere_surface,
    tail_horizon,
    truncated_second_moment_critical,
)
from hypcell.moments import SpectralIntegrand, residue_poles
from hypcell.specfun import beta_fn

# (d, gamma, value): untruncated second moments, 25-digit references
FROZEN_M2 = [
    (3, 8.0, 1.1423153242001572),       # = 25 pi^2 / 216
    (2, 3.0, 15.560386015172104),
    (2, 2.5, 52.268834456277001),
    (5, 12.0, 128.15381020546939),
    (5, 15.0, 0.9780714127250938),
    (5, 20.0, 0.0171479494723408767),
]

# (d, gamma, value): untruncated first moments
FROZEN_M1 = [
    (2, 3.0, 2.3731961166016523),       # = 2 pi^3 / (4 gamma^2 - pi^2)
    (3, 8.0, math.pi / 6.0),
    (5, 12.0, 2.0324735860664662),
]


@pytest.mark.parametrize("d,gamma,ref", FROZEN_M2)
def test_spectral_frozen_values(d, gamma, ref):
    rep = second_moment_spectral(ModelParams(d, gamma), rel_tol=1e-11)
    assert math.isclose(rep.value, ref, rel_tol=1e-9), (d, gamma)
    assert rep.error_estimate < 1e-8 * abs(rep.value)


@pytest.mark.parametrize("d,gamma,ref",
                         [row for row in FROZEN_M2 if row[0] % 2 == 1])
def test_residue_frozen_values(d, gamma, ref):
    rep = second_moment_residue(ModelParams(d, gamma))
    assert math.isclose(rep.value, ref, rel_tol=1e-11), (d, gamma)


def test_residue_even_dimension_rejected():
    with pytest.raises(DomainError):
        second_moment_residue(ModelParams(2, 3.0))


def test_residue_pole_count_is_finite():
    specs = residue_poles(ModelParams(3, 8.0))
    assert len(specs) >= 1
    assert all(s.order == 3 for s in specs)
    assert all(s.radius > 0.0 for s in specs)


@pytest.mark.parametrize("d,gamma", [(2, 3.0), (3, 8.0), (4, 9.0)])
def test_direct_route_agrees_with_spectral(d, gamma):
    p = ModelParams(d, gamma)
    spec = second_moment_spectral(p, rel_tol=1e-11)
    direct = second_moment_direct(p, rel_tol=1e-8)
    assert math.isclose(direct.value, spec.value, rel_tol=1e-6), (d, gamma)


def test_direct_truncation_monotone_in_radius():
    p = ModelParams(2, 3.0)
    v2 = second_moment_direct(p, R=2.0, rel_tol=1e-8).value
    v4 = second_moment_direct(p, R=4.0, rel_tol=1e-8).value
    v30 = second_moment_direct(p, R=30.0, rel_tol=1e-8).value
    vinf = second_moment_direct(p, rel_tol=1e-8).value
    assert v2 < v4 < v30 <= vinf * (1.0 + 1e-9)
    assert math.isclose(v30, vinf, rel_tol=1e-6)


def test_subcritical_truncated_moments_are_finite():
    sub = ModelParams(2, 1.0)
    assert second_moment_direct(sub, R=3.0, rel_tol=1e-6).value > 0.0
    assert first_moment(sub, R=3.0).value > 0.0


def test_subcritical_untruncated_raises():
    sub = ModelParams(2, 1.0)
    crit = ModelParams(2, critical_intensity(2))
    for p in (sub, crit):
        with pytest.raises(DomainError):
            second_moment_spectral(p)
        with pytest.raises(DomainError):
            second_moment_direct(p)
        with pytest.raises(DomainError):
            first_moment(p)
    with pytest.raises(DomainError):
        second_moment_residue(ModelParams(3, 2.0))


@pytest.mark.parametrize("d,gamma,ref", FROZEN_M1)
def test_first_moment_frozen_values(d, gamma, ref):
    rep = first_moment(ModelParams(d, gamma))
    assert math.isclose(rep.value, ref, rel_tol=1e-9), (d, gamma)


def test_first_moment_beta_closed_form():
    # omega_d 2^-d B(c_d (gamma - gamma_c), d) on a seeded grid
    rng = np.random.default_rng(9)
    for d in (2, 3, 4, 5):
        gc = critical_intensity(d)
        for g in gc * (1.0 + rng.uniform(0.05, 2.0, size=3)):
            p = ModelParams(d, float(g))
            closed = sphere_surface(d) * 2.0 ** (-d) \
                * beta_fn(p.c_d * (g - gc), d)
            assert math.isclose(first_moment(p).value, closed,
                                rel_tol=1e-8), (d, g)


def test_first_moment_near_critical_exact_law():
    # in the plane (gamma - gamma_c) M1 = pi^3 / (2 gamma + pi) exactly
    for eps in (1e-3, 1e-5):
        g = 0.5 * math.pi * (1.0 + eps)
        lhs = (g - 0.5 * math.pi) * first_moment(ModelParams(2, g)).value
        rhs = math.pi ** 3 / (2.0 * g + math.pi)
        assert math.isclose(lhs, rhs, rel_tol=1e-7), eps


def test_euclidean_constants():
    assert math.isclose(euclidean_limit_constant(2),
                        4.0 * math.pi ** 6 / 7.0, rel_tol=1e-13)
    assert math.isclose(euclidean_limit_constant(3),
                        14336.0 * math.pi ** 2, rel_tol=1e-13)
    # scaling gamma^-2d: the constant is the gamma = 1 value
    assert math.isclose(euclidean_second_moment(2, 2.0) * 2.0 ** 4,
                        euclidean_limit_constant(2), rel_tol=1e-13)
    assert math.isclose(euclidean_second_moment(3, 3.0) * 3.0 ** 6,
                        euclidean_limit_constant(3), rel_tol=1e-13)


def test_critical_divergence_constants():
    assert math.isclose(critical_divergence_constant(2),
                        math.pi ** 4 / 4.0, rel_tol=1e-13)
    assert math.isclose(critical_divergence_constant(3),
                        16.0 * math.pi ** 2, rel_tol=1e-13)


def test_truncated_critical_frozen_values():
    # pinned against a pointwise-verified run (inner integrals checked
    # against the elementary antiderivative for d = 3 and a 30-digit
    # corner evaluation for d = 2)
    pins = [(2, 10.0, 2.85078143e3), (2, 20.0, 2.00052288e4),
            (3, 20.0, 5.23538306e4)]
    for d, R, ref in pins:
        rep = truncated_second_moment_critical(d, R, rel_tol=1e-6)
        assert math.isclose(rep.value, ref, rel_tol=2e-5), (d, R)


def test_truncated_critical_rejects_infinite_radius():
    with pytest.raises(DomainError):
        truncated_second_moment_critical(2, math.inf)


TRANSFORM_TRIPLES = [
    # (d, gamma, lam, closed-form value frozen from the reference run)
    (2, 3.0, 0.5, 6.348031005066112),
    (3, 8.0, 1.0, 2.5132741228718345),  # = 4 pi / 5
    (3, 8.0, 2.0, 0.7733151147297953),
]


@pytest.mark.parametrize("d,gamma,lam,ref", TRANSFORM_TRIPLES)
def test_spherical_transform_closed_frozen(d, gamma, lam, ref):
    p = ModelParams(d, gamma)
    assert math.isclose(spherical_transform_closed(p, lam), ref,
                        rel_tol=1e-12)


@pytest.mark.parametrize("d,gamma,lam,ref", TRANSFORM_TRIPLES)
def test_spherical_transform_numeric_matches_closed(d, gamma, lam, ref):
    p = ModelParams(d, gamma)
    num = spherical_transform_numeric(p, lam, rel_tol=1e-8)
    assert math.isclose(num, ref, rel_tol=1e-5)


def test_spherical_transform_continuous_at_zero():
    p = ModelParams(2, 3.0)
    at0 = spherical_transform_closed(p, 0.0)
    near0 = spherical_transform_closed(p, 1e-6)
    assert math.isclose(at0, near0, rel_tol=1e-8)
    assert math.isclose(spherical_transform_numeric(p, 0.0), at0,
                        rel_tol=1e-6)


def test_spectral_integrand_zero_and_positivity():
    f = SpectralIntegrand(ModelParams(2, 3.0))
    assert f(0.0) == 0.0
    lam = np.geomspace(0.01, 50.0, 20)
    assert np.all(f(lam) > 0.0)


def test_spectral_integrand_tail_exponent():
    # log-log slope of the integrand approaches -(2d + 4)
    for d in (2, 3, 5):
        p = ModelParams(d, 1.3 * critical_intensity(d))
        f = SpectralIntegrand(p)
        lam = np.geomspace(100.0, 1000.0, 30)
        y = np.array([f.log_value(x) for x in lam])
        slope = np.polyfit(np.log(lam), y, 1)[0]
        assert abs(slope + 2.0 * d + 4.0) < 0.05, d


def test_tail_horizon_grows_with_tolerance():
    p = ModelParams(2, 1.6)
    h1 = tail_horizon(p, 1e-6)
    h2 = tail_horizon(p, 1e-12)
    assert 0.0 < h1 < h2 < math.inf


def test_moment_reports_carry_metadata():
    rep = second_moment_spectral(ModelParams(3, 8.0))
    assert rep.method == "spectral"
    assert rep.d == 3 and rep.gamma == 8.0
    assert rep.evaluations > 0
    rep = first_moment(ModelParams(2, 2.0), R=3.0)
    assert rep.R == 3.0

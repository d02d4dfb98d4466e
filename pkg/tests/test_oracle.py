import math

import numpy as np
import pytest

from fbmcrw import (Family, ParameterError, enumerate_quenched,
                    exact_fbm_sample, fbm_covariance, fgn_autocovariance,
                    make_measure, quadrature_moment)


def test_fbm_covariance_identities():
    for h in (0.2, 0.5, 0.8):
        for s, t in ((0.3, 0.7), (0.1, 0.1), (1.0, 0.25)):
            c = fbm_covariance(s, t, h)
            assert c == fbm_covariance(t, s, h)
        assert fbm_covariance(0.6, 0.6, h) == pytest.approx(0.6 ** (2 * h),
                                                            rel=1e-14)
    # H = 1/2 collapses to Brownian motion
    assert fbm_covariance(0.3, 0.8, 0.5) == pytest.approx(0.3, rel=1e-14)


def test_fgn_autocovariance_values():
    assert fgn_autocovariance(0, 0.75) == 1.0
    assert fgn_autocovariance(1, 0.75) == pytest.approx(math.sqrt(2.0) - 1.0,
                                                        rel=1e-15)
    assert fgn_autocovariance(1, 0.25) == pytest.approx(
        (math.sqrt(2.0) - 2.0) / 2.0, rel=1e-15)
    for n in range(1, 6):
        assert fgn_autocovariance(n, 0.5) == 0.0
    # tail: n^(2-2H) rho(n) -> H(2H-1)
    h = 0.8
    assert 500.0 ** 0.4 * fgn_autocovariance(500, h) == pytest.approx(
        h * (2 * h - 1), rel=1e-4)


def test_exact_sampler_deterministic_and_bounded():
    a = exact_fbm_sample(0.7, 32, 123)
    b = exact_fbm_sample(0.7, 32, 123)
    assert np.array_equal(a, b)
    assert a.shape == (32,)
    with pytest.raises(ParameterError):
        exact_fbm_sample(0.7, 0, 1)
    with pytest.raises(ParameterError):
        exact_fbm_sample(0.7, 5000, 1)
    with pytest.raises(ParameterError):
        exact_fbm_sample(1.0, 16, 1)


def test_exact_sampler_covariance():
    h, n, reps = 0.75, 8, 6000
    rng = np.random.default_rng(7)
    samples = np.array([exact_fbm_sample(h, n, rng) for _ in range(reps)])
    times = np.arange(1, n + 1) / n
    emp = samples.T @ samples / reps
    for i in range(n):
        for j in range(n):
            want = fbm_covariance(times[i], times[j], h)
            se = math.sqrt((emp[i, i] * emp[j, j] + emp[i, j] ** 2) / reps)
            assert abs(emp[i, j] - want) <= 5.0 * se


def test_quenched_pair_moments():
    for p in (0.0, 0.25, 0.5, 0.625, 1.0):
        for n in range(0, 6):
            got = enumerate_quenched("CRW", p, 8, (1, 1 + n))
            assert got == pytest.approx((2 * p - 1) ** n, abs=1e-13)
    for p in (0.25, 0.5, 0.625, 1.0):
        for n in range(1, 6):
            got = enumerate_quenched("Y", p, 8, (2, 2 + n))
            assert got == pytest.approx(-p * (1 - 2 * p) ** (n - 1),
                                        abs=1e-13)
        assert enumerate_quenched("Y", p, 6, (3, 3)) == pytest.approx(
            1.0, abs=1e-13)


def test_quenched_odd_and_empty_products():
    assert enumerate_quenched("CRW", 0.3, 6, ()) == 1.0
    assert enumerate_quenched("CRW", 0.3, 6, (2,)) == 0.0
    assert enumerate_quenched("Y", 0.3, 6, (1, 2, 3)) == 0.0


def test_quenched_validation():
    with pytest.raises(ParameterError):
        enumerate_quenched("CRW", 0.5, 15, (1, 2))
    with pytest.raises(ParameterError):
        enumerate_quenched("CRW", 1.5, 8, (1, 2))
    with pytest.raises(ParameterError):
        enumerate_quenched("CRW", 0.5, 8, (0, 1))
    with pytest.raises(ParameterError):
        enumerate_quenched("Y", 0.0, 8, (1, 2))
    with pytest.raises(ParameterError):
        enumerate_quenched("walk", 0.5, 8, (1, 2))


def test_quadrature_rejects_bad_lag():
    m = make_measure(Family.MU_K, 0.75, 1.0)
    with pytest.raises(ParameterError):
        quadrature_moment(m, -1)

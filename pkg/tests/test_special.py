import math

import mpmath
import pytest

from fbmcrw import ParameterError, log_gamma
from fbmcrw.special import gamma_ratio, log_beta


def test_log_gamma_matches_mpmath():
    mpmath.mp.dps = 40
    xs = [1e-6, 0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.7, 8.0, 12.5,
          100.0, 1e4, 1e8, 1e15]
    for x in xs:
        ref = float(mpmath.loggamma(x))
        err = abs(log_gamma(x) - ref)
        assert err <= 1e-12 * max(1.0, abs(ref)), x


def test_log_gamma_integers_exact():
    fact = 1.0
    for n in range(2, 15):
        fact *= n - 1
        assert log_gamma(n) == pytest.approx(math.log(fact), rel=1e-14)


def test_log_gamma_rejects_nonpositive():
    for bad in (0.0, -1.0, -0.5):
        with pytest.raises(ParameterError):
            log_gamma(bad)


def test_log_beta_symmetry_and_value():
    assert log_beta(2.0, 3.0) == pytest.approx(math.log(1.0 / 12.0), rel=1e-13)
    assert log_beta(0.3, 4.2) == pytest.approx(log_beta(4.2, 0.3), rel=1e-13)


def test_gamma_ratio():
    assert gamma_ratio(7.0, 5.0) == pytest.approx(30.0, rel=1e-12)
    assert gamma_ratio(0.5, 2.5) == pytest.approx(1.0 / (1.5 * 0.5), rel=1e-12)

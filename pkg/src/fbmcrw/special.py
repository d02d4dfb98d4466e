"""Log-gamma via a Lanczos approximation.

Every scaling constant and closed-form autocovariance in this package runs
through gamma-function ratios, so the evaluation has to be reproducible and
accurate to better than 1e-12 relative error on [0.1, 200].  The g=7, n=9
Lanczos coefficient set delivers about 15 significant digits there; the test
suite checks it against an arbitrary-precision oracle.
"""

import math

from .errors import ParameterError

_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
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
_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0.

    Uses the reflection formula below 0.5 so the Lanczos series is only
    evaluated where it converges fast.  Exact at the integer points 1 and 2.
    """
    x = float(x)
    if not x > 0.0 or math.isinf(x) or math.isnan(x):
        raise ParameterError(f"log_gamma requires finite x > 0, got {x!r}")
    if x == 1.0 or x == 2.0:
        return 0.0
    if x < 0.5:
        # log Gamma(x) = log(pi / sin(pi x)) - log Gamma(1 - x)
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    z = x - 1.0
    acc = _LANCZOS_COEFFS[0]
    for i in range(1, 9):
        acc += _LANCZOS_COEFFS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_TWO_PI + (z + 0.5) * math.log(t) - t + math.log(acc)


def log_beta(a: float, b: float) -> float:
    """log B(a, b) = log Gamma(a) + log Gamma(b) - log Gamma(a + b)."""
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)


def gamma_ratio(a: float, b: float) -> float:
    """Gamma(a) / Gamma(b) for positive a, b, computed in log space."""
    return math.exp(log_gamma(a) - log_gamma(b))

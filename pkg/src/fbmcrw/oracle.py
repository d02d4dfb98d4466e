"""Ground-truth engines independent of the walk construction.

Four tools: the exact fBm covariance kernel, exact Gaussian sampling through
a Cholesky factor at desk scale, adaptive quadrature of measure moments with
endpoint-singularity substitutions, and exhaustive enumeration of small
quenched walks.  Everything here is deliberately implemented through a
different route than the production code it validates: the quadratures work
on the density side rather than the closed forms, and the enumeration sums
literal path probabilities.
"""

from __future__ import annotations

import math
import threading
from typing import Sequence

import numpy as np
from scipy.integrate import quad

from .errors import NumericError, ParameterError
from .measures import Family, MeasureSpec, Regime

_QUAD_OPTS = dict(epsabs=1e-13, epsrel=1e-13, limit=400)


def fbm_covariance(s: float, t: float, hurst: float) -> float:
    """E[B_H(s) B_H(t)] = (s^2H + t^2H - |s-t|^2H) / 2."""
    if s < 0.0 or t < 0.0:
        raise ParameterError("times must be nonnegative")
    if not 0.0 < hurst < 1.0:
        raise ParameterError("Hurst parameter must lie in (0, 1)")
    two_h = 2.0 * hurst
    return 0.5 * (s ** two_h + t ** two_h - abs(s - t) ** two_h)


def fgn_autocovariance(n: int, hurst: float) -> float:
    """Unit-grid increment autocovariance ((n+1)^2H - 2n^2H + (n-1)^2H)/2."""
    n = int(n)
    if n < 0:
        raise ParameterError("lag must be nonnegative")
    if not 0.0 < hurst < 1.0:
        raise ParameterError("Hurst parameter must lie in (0, 1)")
    if n == 0:
        return 1.0
    two_h = 2.0 * hurst
    return 0.5 * ((n + 1) ** two_h - 2.0 * n ** two_h + (n - 1) ** two_h)


# ---------------------------------------------------------------------------
# exact Gaussian sampling

_MAX_EXACT_N = 4096
_chol_cache: dict[tuple[float, int], np.ndarray] = {}
_chol_lock = threading.Lock()


def _cholesky_psd(a: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor with a pivot clamp on the PSD boundary.

    Pivots in [-1e-10, 0] are treated as exact zeros (round-off on a
    semidefinite matrix); anything more negative is a genuine failure and
    raises instead of being patched.
    """
    n = a.shape[0]
    low = np.zeros_like(a)
    for j in range(n):
        d = a[j, j] - low[j, :j] @ low[j, :j]
        if d < -1e-10:
            raise NumericError(f"matrix is not positive semidefinite (pivot {d:.3e})")
        if d <= 0.0:
            continue
        root = math.sqrt(d)
        low[j, j] = root
        if j + 1 < n:
            low[j + 1:, j] = (a[j + 1:, j] - low[j + 1:, :j] @ low[j, :j]) / root
    return low


def _chol_factor(hurst: float, n: int) -> np.ndarray:
    key = (float(hurst), int(n))
    fac = _chol_cache.get(key)
    if fac is None:
        with _chol_lock:
            fac = _chol_cache.get(key)
            if fac is None:
                t = np.arange(1, n + 1, dtype=np.float64) / n
                two_h = 2.0 * hurst
                s = t ** two_h
                cov = 0.5 * (s[:, None] + s[None, :] - np.abs(t[:, None] - t[None, :]) ** two_h)
                fac = _cholesky_psd(cov)
                _chol_cache[key] = fac
    return fac


def exact_fbm_sample(hurst: float, n: int, rng) -> np.ndarray:
    """One exact fBm path on the grid i/n, i = 1..n (value at 0 omitted).

    `rng` is a numpy Generator or an integer seed.  O(n^3) factorization,
    cached per (H, n); n is capped at 4096.
    """
    n = int(n)
    if not 1 <= n <= _MAX_EXACT_N:
        raise ParameterError(f"n must lie in [1, {_MAX_EXACT_N}]")
    if not 0.0 < hurst < 1.0:
        raise ParameterError("Hurst parameter must lie in (0, 1)")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    fac = _chol_factor(hurst, n)
    return fac @ rng.standard_normal(n)


# ---------------------------------------------------------------------------
# quadrature of measure moments
#
# All integrals are brought to the unit interval with the endpoint weights
# x^(alpha-1) (1-x)^(beta-1) made explicit, then each weight is substituted
# away (v = x^alpha on the left, w = (1-x)^beta on the right) so QUADPACK
# sees smooth integrands.  NuK uses the exponential-scale form instead.

def _log_split(y: float, cy: float) -> float:
    """log(y) from whichever of y and its complement cy = 1-y is exact."""
    return math.log(y) if y <= 0.5 else math.log1p(-cy)


def _quad01_weighted(g, alpha: float, beta: float) -> float:
    """Integral over (0,1) of g(x, 1-x) x^(alpha-1) (1-x)^(beta-1).

    g must be smooth on [0,1]; it receives the complement 1-x as computed
    on the accurate side of the split, so it never has to recover small
    distances from the endpoints itself.
    """

    def left(v):
        x = v ** (1.0 / alpha)
        cx = 1.0 - x
        return g(x, cx) * cx ** (beta - 1.0) / alpha

    def right(w):
        cx = w ** (1.0 / beta)
        x = 1.0 - cx
        return g(x, cx) * x ** (alpha - 1.0) / beta

    lo, err1 = quad(left, 0.0, 0.5 ** alpha, **_QUAD_OPTS)
    hi, err2 = quad(right, 0.0, 0.5 ** beta, **_QUAD_OPTS)
    if err1 + err2 > 1e-11:
        raise NumericError("weighted quadrature did not reach tolerance")
    return lo + hi


def _nu_exp_integral(c: float, j: int, hurst: float) -> float:
    """Integral over (0,inf) of e^(-c y) (1 - e^-y)^j y^(-1-2H).

    Split at y = 1; on (0,1] the substitution y = z^(1/(j-2H)) makes the
    integrand smooth, on [1,inf) it decays exponentially.
    """
    two_h = 2.0 * hurst
    b = j - two_h
    if b <= 0.0:
        raise NumericError("exponential-scale integral needs j > 2H")

    def head(z):
        y = z ** (1.0 / b)
        if y < 1e-8:
            q = 1.0 - y / 2.0 + y * y / 6.0
        else:
            q = -math.expm1(-y) / y
        return (q ** j) * math.exp(-c * y) / b

    def tail(y):
        return math.exp(-c * y) * (-math.expm1(-y)) ** j * y ** (-1.0 - two_h)

    lo, err1 = quad(head, 0.0, 1.0, **_QUAD_OPTS)
    hi, err2 = quad(tail, 1.0, np.inf, **_QUAD_OPTS)
    if err1 + err2 > 1e-11:
        raise NumericError("exponential-scale quadrature did not reach tolerance")
    return lo + hi


def quadrature_moment(m: MeasureSpec, n: int) -> float:
    """The defining moment integral of r(n), evaluated numerically.

    Regimes Half/Super integrate (2p-1)^n against the measure; regime Sub
    integrates -p(1-2p)^(n-1).  Independent of the closed forms: works on
    the density of each family with singularities substituted away.
    """
    n = int(n)
    if n < 0:
        raise ParameterError("moment order must be nonnegative")
    H, k = m.hurst, m.k

    def one(x, cx):
        return 1.0
    if m.family in (Family.MU_BASE, Family.MU_K):
        if m.regime is not Regime.SUB:
            # x = 2p-1 ~ Beta(k, b) with b = 2-2H (b = 1 at H = 1/2);
            # the x^n factor folds into the left Beta exponent
            b = 2.0 - 2.0 * H
            return _quad01_weighted(one, k + n, b) / _quad01_weighted(one, k, b)
        # -E[p (1-2p)^(n-1)] with q = 2p ~ Beta(a, k); n = 0 is the raw
        # normalization, whose numeric value is the mass ratio 1
        a = 1.0 - 2.0 * H
        den = _quad01_weighted(one, a, k)
        if n == 0:
            return den / den
        return -0.5 * _quad01_weighted(one, a + 1.0, n + k - 1.0) / den
    if m.family is Family.NU_K:
        if m.regime is Regime.SUPER:
            den = _nu_exp_integral(k, 2, H)
            return _nu_exp_integral(n + k, 2, H) / den if n else den / den
        den = _nu_exp_integral(k, 1, H)
        if n == 0:
            return den / den
        return -0.5 * _nu_exp_integral(n + k - 1.0, 2, H) / den
    return _mu_prime_density_moment(m, n)


def _mu_prime_density_moment(m: MeasureSpec, n: int) -> float:
    """MuPrimeK moments from the density of x = |2p-1|.

    Distinct numerical route from the transform integral used by
    increment_autocovariance: the density k*b*(1-(1-x)^b)^(k-1)*(1-x)^(b-1)
    (Super) is integrated with its endpoint weights substituted away.
    """
    H, k = m.hurst, m.k
    if m.regime is not Regime.SUB:
        b = 2.0 - 2.0 * H

        def g(x, cx):
            # (1 - (1-x)^b) / x, extended continuously to b at x = 0
            ratio = b if x < 1e-12 else -math.expm1(b * _log_split(cx, x)) / x
            return k * b * ratio ** (k - 1.0)

        den = _quad01_weighted(g, k, b)
        return _quad01_weighted(g, k + n, b) / den if n else den / den
    a = 1.0 - 2.0 * H

    def g2(x, cx):
        # (1 - x^a) / (1-x), extended continuously to a at x = 1
        ratio = a if cx < 1e-12 else -math.expm1(a * _log_split(x, cx)) / cx
        return k * a * ratio ** (k - 1.0)

    den = _quad01_weighted(g2, a, k)
    if n == 0:
        return den / den
    return -0.5 * _quad01_weighted(g2, a + 1.0, n + k - 1.0) / den


# ---------------------------------------------------------------------------
# exhaustive enumeration of quenched walks

_MAX_ENUM_WINDOW = 14


def enumerate_quenched(kind: str, p: float, window: int,
                       indices: Sequence[int]) -> float:
    """Exact E[prod of increments at `indices`] over all 2^window paths.

    kind is "CRW" (sign walk: repeat previous sign with probability p) or
    "Y" (pair process: emit s/sqrt(p) and flip with probability p, else 0).
    `indices` are 1-based step numbers, repeats allowed.  The initial sign
    is averaged over +-1 with weight 1/2, so odd products vanish exactly.
    """
    window = int(window)
    if not 1 <= window <= _MAX_ENUM_WINDOW:
        raise ParameterError(f"window must lie in [1, {_MAX_ENUM_WINDOW}]")
    if not 0.0 <= p <= 1.0:
        raise ParameterError("p must lie in [0, 1]")
    idx = np.asarray(list(indices), dtype=np.int64)
    if idx.size == 0:
        return 1.0
    if idx.min() < 1 or idx.max() > window:
        raise ParameterError("indices must lie in 1..window")
    if idx.size % 2 == 1:
        return 0.0
    npaths = 1 << window
    paths = np.arange(npaths, dtype=np.uint32)
    bits = ((paths[:, None] >> np.arange(window, dtype=np.uint32)[None, :]) & 1).astype(np.int8)
    ones = bits.sum(axis=1).astype(np.float64)
    prob = p ** ones * (1.0 - p) ** (window - ones)
    if kind == "CRW":
        # bit g-1 set = step g repeats the previous sign
        sigma = np.where(bits == 1, 1, -1).astype(np.int64)
        eps = np.cumprod(sigma, axis=1)
        vals = np.ones(npaths)
        for i in idx:
            vals = vals * eps[:, i - 1]
    elif kind == "Y":
        if p == 0.0:
            raise ParameterError("the pair process requires p > 0")
        emitted_before = np.cumsum(bits, axis=1) - bits
        term = bits * np.where(emitted_before % 2 == 0, 1, -1)
        vals = np.ones(npaths)
        for i in idx:
            vals = vals * term[:, i - 1]
        vals = vals * p ** (-0.5 * idx.size)
    else:
        raise ParameterError(f"unknown walk kind {kind!r}")
    return float(np.sum(prob * vals))

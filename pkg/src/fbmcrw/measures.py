"""Persistence mixing measures.

A measure assigns the law of the persistence parameter p of one walk.  Four
families are implemented, each in up to three regimes determined by the Hurst
parameter H:

    Super (H > 1/2): support [1/2, 1], positively correlated steps;
    Half  (H = 1/2): support [1/2, 1], summable correlations;
    Sub   (H < 1/2): support [0, 1/2], negatively correlated pair process.

Families:

    MuBase     single-parameter base measure (equals MuK with k = 1);
    MuK        Beta-shaped generalization with shape k > 0;
    MuPrimeK   explicit inverse-transform family, same constants as MuBase
               up to a factor 1/sqrt(k);
    NuK        exactly-summable family whose annealed step autocovariance is
               a pure second difference of m^(2H) (H != 1/2 only).

The module evaluates, for each measure: i.i.d. persistence draws (bit
reproducible on the package's counter-based streams), the annealed step
autocovariance r(n), the scaling constant entering the fBm normalization,
and the compensated partial sums used by the sub-diffusive regime.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from .errors import NumericError, ParameterError
from .rng import Stream, uniform_column
from .special import log_gamma

H_MIN = 0.01
H_MAX = 0.99


class Family(Enum):
    MU_BASE = "mu-base"
    MU_K = "mu-k"
    MU_PRIME_K = "mu-prime-k"
    NU_K = "nu-k"


class Regime(Enum):
    SUB = "sub"
    HALF = "half"
    SUPER = "super"


class ConstantKind(Enum):
    CH = "CH"
    CHK = "CHk"
    CPRIME_HK = "CPrimeHk"
    CDOUBLEPRIME_HK = "CDoublePrimeHk"


@dataclass(frozen=True)
class ScalingConstant:
    c: float
    definition: ConstantKind


@dataclass(frozen=True)
class MeasureSpec:
    """Validated measure description; construct through make_measure."""

    family: Family
    hurst: float
    k: float
    regime: Regime

    def __post_init__(self):
        if not (H_MIN <= self.hurst <= H_MAX):
            raise ParameterError(
                f"Hurst parameter must lie in [{H_MIN}, {H_MAX}], got {self.hurst}")
        if not (self.k > 0.0 and math.isfinite(self.k)):
            raise ParameterError(f"shape k must be a positive finite real, got {self.k}")
        if self.regime is not regime_of(self.hurst):
            raise ParameterError("regime inconsistent with H")
        if self.family is Family.NU_K and self.regime is Regime.HALF:
            raise ParameterError("the NuK family is defined only for H != 1/2")


def regime_of(hurst: float) -> Regime:
    if hurst == 0.5:
        return Regime.HALF
    return Regime.SUPER if hurst > 0.5 else Regime.SUB


def make_measure(family: Family, hurst: float, k: float = 1.0) -> MeasureSpec:
    """Validate (family, H, k) and resolve the regime.

    MuBase has no shape parameter; k is forced to 1 so that MuBase compares
    equal to MuK with k=1 (the two coincide in law and in draw sequence).
    """
    if not isinstance(family, Family):
        raise ParameterError(f"unknown family {family!r}")
    hurst = float(hurst)
    k = 1.0 if family is Family.MU_BASE else float(k)
    return MeasureSpec(family, hurst, k, regime_of(hurst))


# ---------------------------------------------------------------------------
# second differences of x^(2H), evaluated without catastrophic cancellation

def _delta2(m, two_h: float):
    """(m+1)^2H - 2 m^2H + (m-1)^2H for m >= 1, stable for large m."""
    m = np.asarray(m, dtype=np.float64)
    up = np.expm1(two_h * np.log1p(1.0 / m))
    dn = np.expm1(two_h * np.log1p(-1.0 / m))
    return m ** two_h * (up + dn)


def _delta1(m, two_h: float):
    """(m+1)^2H - m^2H, stable for large m."""
    m = np.asarray(m, dtype=np.float64)
    return m ** two_h * np.expm1(two_h * np.log1p(1.0 / m))


# ---------------------------------------------------------------------------
# annealed step autocovariance r(n)

def increment_autocovariance(m: MeasureSpec, n: int) -> float:
    """Autocovariance r(n) of the annealed walk increments; r(0) = 1.

    Closed gamma-ratio forms for MuBase/MuK, second-difference quotients for
    NuK, adaptive quadrature through the sampling transform for MuPrimeK.
    """
    n = int(n)
    if n < 0:
        raise ParameterError("lag n must be nonnegative")
    if n == 0:
        return 1.0
    H, k = m.hurst, m.k
    if m.family in (Family.MU_BASE, Family.MU_K):
        if m.regime is Regime.SUPER:
            b = 2.0 - 2.0 * H
            return math.exp(log_gamma(n + k) + log_gamma(k + b)
                            - log_gamma(k) - log_gamma(n + k + b))
        if m.regime is Regime.HALF:
            return k / (n + k)
        a = 1.0 - 2.0 * H
        return -(a / 2.0) * math.exp(log_gamma(k + a) + log_gamma(n + k - 1.0)
                                     - log_gamma(k) - log_gamma(n + k + a))
    if m.family is Family.NU_K:
        two_h = 2.0 * H
        if m.regime is Regime.SUPER:
            return float(_delta2(n + k + 1.0, two_h) / _delta2(k + 1.0, two_h))
        return float(_delta2(n + k, two_h) / (2.0 * _delta1(k, two_h)))
    return _mu_prime_autocov(m, n)


def autocovariance_sequence(m: MeasureSpec, n_max: int) -> np.ndarray:
    """Vector [r(0), ..., r(n_max)] via stable term recurrences.

    MuPrimeK falls back to one quadrature per lag and is capped at 10^4 lags.
    """
    n_max = int(n_max)
    if n_max < 0:
        raise ParameterError("n_max must be nonnegative")
    H, k = m.hurst, m.k
    out = np.empty(n_max + 1)
    out[0] = 1.0
    if n_max == 0:
        return out
    n = np.arange(1, n_max + 1, dtype=np.float64)
    if m.family in (Family.MU_BASE, Family.MU_K):
        if m.regime is Regime.SUPER:
            b = 2.0 - 2.0 * H
            # r(n+1)/r(n) = (n+k)/(n+k+b), seeded at r(1)
            ratios = (n[:-1] + k) / (n[:-1] + k + b)
            r1 = math.exp(log_gamma(1.0 + k) + log_gamma(k + b)
                          - log_gamma(k) - log_gamma(1.0 + k + b))
            out[1:] = r1 * np.concatenate(([1.0], np.cumprod(ratios)))
        elif m.regime is Regime.HALF:
            out[1:] = k / (n + k)
        else:
            a = 1.0 - 2.0 * H
            ratios = (n[:-1] + k - 1.0) / (n[:-1] + k + a)
            r1 = -(a / 2.0) * math.exp(log_gamma(k + a) - log_gamma(k + 1.0 + a))
            out[1:] = r1 * np.concatenate(([1.0], np.cumprod(ratios)))
    elif m.family is Family.NU_K:
        two_h = 2.0 * H
        if m.regime is Regime.SUPER:
            out[1:] = _delta2(n + k + 1.0, two_h) / _delta2(k + 1.0, two_h)
        else:
            out[1:] = _delta2(n + k, two_h) / (2.0 * _delta1(k, two_h))
    else:
        if n_max > 10_000:
            raise ParameterError("MuPrimeK sequences are quadrature-based; n_max too large")
        for i in range(1, n_max + 1):
            out[i] = _mu_prime_autocov(m, i)
    return out


def _quad_checked(fn, lo, hi, tol=1e-12):
    val, err = quad(fn, lo, hi, epsabs=tol, epsrel=1e-12, limit=300)
    if err > 5e-10:
        raise NumericError(f"quadrature did not converge (reported error {err:.2e})")
    return val


def _mu_prime_autocov(m: MeasureSpec, n: int) -> float:
    """r(n) for MuPrimeK by integrating through the sampling transform.

    The uniform variable is substituted (u = s^k when k >= 1, or kept as the
    Beta-type weight otherwise) so the integrand stays smooth at both ends.
    """
    H, k = m.hurst, m.k
    if m.regime is Regime.SUPER:
        inv_b = 1.0 / (2.0 - 2.0 * H)

        def integrand(s):
            x = 1.0 - (1.0 - s) ** inv_b
            return (x ** n) * k * s ** (k - 1.0)

        def integrand_v(v):
            s = v ** (1.0 / k)
            return (1.0 - (1.0 - s) ** inv_b) ** n

    elif m.regime is Regime.HALF:
        def integrand(s):
            return (s ** n) * k * s ** (k - 1.0)

        def integrand_v(v):
            return v ** (n / k)

    else:
        inv_a = 1.0 / (1.0 - 2.0 * H)

        def integrand(s):
            x = (1.0 - s) ** inv_a
            return -0.5 * x * (1.0 - x) ** (n - 1) * k * s ** (k - 1.0)

        def integrand_v(v):
            x = (1.0 - v ** (1.0 / k)) ** inv_a
            return -0.5 * x * (1.0 - x) ** (n - 1)

    # s-form has an s^(k-1) endpoint weight: fine for k >= 1, substituted away
    # (v = s^k) for k < 1.
    return _quad_checked(integrand if k >= 1.0 else integrand_v, 0.0, 1.0)


def compensation_partial_sum(m: MeasureSpec, L) -> float:
    """1 + 2 sum_{n<=L} r(n) for a Sub-regime measure.

    Equals the annealed L-th moment of (1 - 2p), so it is positive and
    strictly decreasing in L, with limit 0.  Evaluated in closed form
    (MuBase/MuK/NuK, valid for arbitrarily large L) or by one quadrature
    (MuPrimeK).
    """
    if m.regime is not Regime.SUB:
        raise ParameterError("compensation identity applies to the Sub regime only")
    L = float(L)
    if L < 0:
        raise ParameterError("L must be nonnegative")
    H, k = m.hurst, m.k
    a = 1.0 - 2.0 * H
    if m.family in (Family.MU_BASE, Family.MU_K):
        # E[(1-q)^L] with q ~ Beta(a, k)
        if L > 1e8:
            # Stirling ratio Gamma(z)/Gamma(z+a) = z^-a (1 + a(a-1)/(2z) + ...)
            z = k + L
            ratio = z ** (-a) * (1.0 + a * (a - 1.0) / (2.0 * z))
            return math.exp(log_gamma(a + k) - log_gamma(k)) * ratio
        return math.exp(log_gamma(k + L) + log_gamma(a + k)
                        - log_gamma(k) - log_gamma(a + k + L))
    if m.family is Family.NU_K:
        two_h = 2.0 * H
        return float(_delta1(k + L, two_h) / _delta1(k, two_h))
    # MuPrimeK: E[(1-2p)^L] through the transform, x = (1-s)^(1/a) as above
    inv_a = 1.0 / a

    def integrand(s):
        return ((1.0 - s) ** inv_a) ** L * k * s ** (k - 1.0)

    def integrand_v(v):
        return ((1.0 - v ** (1.0 / k)) ** inv_a) ** L

    return _quad_checked(integrand if k >= 1.0 else integrand_v, 0.0, 1.0)


# ---------------------------------------------------------------------------
# scaling constants

def scaling_constant(m: MeasureSpec) -> ScalingConstant:
    """Family constant c entering the fBm normalization c / (N^H sqrt(M))."""
    H, k = m.hurst, m.k
    if m.family is Family.MU_BASE:
        if m.regime is Regime.SUPER:
            c = math.sqrt(H * (2.0 * H - 1.0) / math.exp(log_gamma(3.0 - 2.0 * H)))
        elif m.regime is Regime.HALF:
            c = 1.0 / math.sqrt(2.0)
        else:
            c = math.sqrt(2.0 * H / math.exp(log_gamma(2.0 - 2.0 * H)))
        return ScalingConstant(c, ConstantKind.CH)
    if m.family is Family.MU_K:
        if m.regime is Regime.SUPER:
            c = math.sqrt(H * (2.0 * H - 1.0)
                          * math.exp(log_gamma(k) - log_gamma(k + 2.0 - 2.0 * H)))
        elif m.regime is Regime.HALF:
            c = 1.0 / math.sqrt(2.0 * k)
        else:
            c = math.sqrt(2.0 * H * math.exp(log_gamma(k) - log_gamma(k + 1.0 - 2.0 * H)))
        return ScalingConstant(c, ConstantKind.CHK)
    if m.family is Family.MU_PRIME_K:
        base = scaling_constant(make_measure(Family.MU_BASE, H)).c
        return ScalingConstant(base / math.sqrt(k), ConstantKind.CPRIME_HK)
    two_h = 2.0 * H
    if m.regime is Regime.SUPER:
        c = math.sqrt(float(_delta2(k + 1.0, two_h)) / 2.0)
    else:
        c = math.sqrt(float(_delta1(k, two_h)))
    return ScalingConstant(c, ConstantKind.CDOUBLEPRIME_HK)


# ---------------------------------------------------------------------------
# sampling

def sample_persistence(m: MeasureSpec, rng: Stream) -> float:
    """One persistence draw from the stream; advances the stream counter."""
    seed = np.array([rng.seed], dtype=np.uint64)
    gamma = np.array([rng.gamma], dtype=np.uint64)
    t0 = np.array([rng.t], dtype=np.uint64)
    p, t_after = sample_persistence_block(m, seed, gamma, t0)
    rng.t = int(t_after[0])
    return float(p[0])


def sample_persistence_block(m: MeasureSpec, seed: np.ndarray, gamma: np.ndarray,
                             t0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized persistence draws, one per stream.

    Returns (p, t_after) where t_after[j] is stream j's counter after its
    draws; single-uniform families consume exactly one value, the Beta
    rejection sampler a variable count.
    """
    H, k = m.hurst, m.k
    seed = seed.astype(np.uint64, copy=False)
    gamma = gamma.astype(np.uint64, copy=False)
    t0 = t0.astype(np.uint64, copy=False)

    if m.family is Family.MU_K and k != 1.0 and m.regime is not Regime.HALF:
        return _sample_mu_k_beta(m, seed, gamma, t0)

    u = uniform_column(seed, gamma, t0, open_interval=True)
    t_after = t0 + np.uint64(1)
    if m.family is Family.NU_K:
        p = _nu_k_table(m).quantile(u)
        return p, t_after

    if m.regime is Regime.SUPER:
        b = 2.0 - 2.0 * H
        if m.family is Family.MU_PRIME_K:
            p = 1.0 - (1.0 - u ** (1.0 / k)) ** (1.0 / b) / 2.0
        else:
            p = 1.0 - u ** (1.0 / b) / 2.0
    elif m.regime is Regime.HALF:
        if m.family is Family.MU_BASE:
            p = (1.0 + u) / 2.0
        else:
            # MuK and MuPrimeK coincide at H = 1/2: 2p-1 ~ Beta(k, 1)
            p = (1.0 + u ** (1.0 / k)) / 2.0
    else:
        a = 1.0 - 2.0 * H
        if m.family is Family.MU_PRIME_K:
            p = (1.0 - u ** (1.0 / k)) ** (1.0 / a) / 2.0
        else:
            p = u ** (1.0 / a) / 2.0
    return p, t_after


def _box_muller_cos(u1: np.ndarray, u2: np.ndarray) -> np.ndarray:
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * math.pi * u2)


def _gamma_mt_block(seed, gamma, t, shape: float):
    """Marsaglia-Tsang gamma variates, one per stream, from counters t.

    Each rejection attempt consumes exactly three uniforms (two for the
    Box-Muller normal, one for the acceptance test); shapes below 1 consume
    one extra boost uniform after acceptance.  Returns (value, t_after).
    """
    boost = shape < 1.0
    d = (shape + 1.0 if boost else shape) - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    n = seed.shape[0]
    out = np.empty(n)
    t = t.astype(np.uint64, copy=True)
    idx = np.arange(n)
    while idx.size:
        s, g, tt = seed[idx], gamma[idx], t[idx]
        u1 = uniform_column(s, g, tt, open_interval=True)
        u2 = uniform_column(s, g, tt + np.uint64(1), open_interval=True)
        u3 = uniform_column(s, g, tt + np.uint64(2), open_interval=True)
        t[idx] = tt + np.uint64(3)
        z = _box_muller_cos(u1, u2)
        v = (1.0 + c * z) ** 3
        ok = v > 0.0
        with np.errstate(invalid="ignore", divide="ignore"):
            ok &= np.log(u3) < 0.5 * z * z + d - d * v + d * np.where(v > 0, np.log(v), 0.0)
        out[idx[ok]] = d * v[ok]
        idx = idx[~ok]
    if boost:
        u4 = uniform_column(seed, gamma, t, open_interval=True)
        t += np.uint64(1)
        out *= u4 ** (1.0 / shape)
    return out, t


def _sample_mu_k_beta(m: MeasureSpec, seed, gamma, t0):
    H, k = m.hurst, m.k
    if m.regime is Regime.SUPER:
        a1, a2 = k, 2.0 - 2.0 * H
    else:
        a1, a2 = 1.0 - 2.0 * H, k
    g1, t = _gamma_mt_block(seed, gamma, t0, a1)
    g2, t = _gamma_mt_block(seed, gamma, t, a2)
    beta = g1 / (g1 + g2)
    if m.regime is Regime.SUPER:
        return (1.0 + beta) / 2.0, t
    return beta / 2.0, t


# ---------------------------------------------------------------------------
# NuK inverse-CDF table

class _NuKTable:
    """Tabulated quantile function for a NuK measure.

    In the variable y = -log|2p - 1| the density is proportional to
    (1 - e^-y)^j e^-ky y^(-1-2H) with j = 2 (Super) or 1 (Sub).  The
    coordinate z = y^(j-2H) removes the endpoint singularity, leaving the
    smooth weight W(z) = Q(y)^j e^-ky / (j-2H) with Q(y) = (1 - e^-y)/y.
    The CDF is accumulated with per-interval Gauss-Legendre rules on 4096
    intervals and inverted with a monotone cubic interpolant.
    """

    KNOTS = 4097
    GL_POINTS = 16

    def __init__(self, m: MeasureSpec):
        H, k = m.hurst, m.k
        self.sub = m.regime is Regime.SUB
        j = 1 if self.sub else 2
        self.b = j - 2.0 * H
        if self.b <= 0.0:
            raise ParameterError("NuK table regime/H mismatch")
        y_max = max(50.0, 50.0 / k)
        z_edges = np.linspace(0.0, y_max ** self.b, self.KNOTS)
        nodes, weights = np.polynomial.legendre.leggauss(self.GL_POINTS)
        half = np.diff(z_edges) / 2.0
        mid = (z_edges[:-1] + z_edges[1:]) / 2.0
        zz = mid[:, None] + half[:, None] * nodes[None, :]
        masses = half * np.sum(weights[None, :] * self._weight(zz, k), axis=1)
        cdf = np.concatenate(([0.0], np.cumsum(masses)))
        self.total_mass = float(cdf[-1])
        cdf /= cdf[-1]
        # far-tail interval masses underflow against the running sum; drop the
        # flat knots (their mass is below float64 resolution of the CDF)
        keep = np.concatenate(([True], np.diff(cdf) > 0.0))
        cdf, z_edges = cdf[keep], z_edges[keep]
        if cdf.size < 16 or cdf[-1] != 1.0:
            raise NumericError("NuK CDF table degenerated")
        self._quantile = PchipInterpolator(cdf, z_edges, extrapolate=False)
        self._cdf = PchipInterpolator(z_edges, cdf, extrapolate=False)
        self.z_max = float(z_edges[-1])

    def _weight(self, z, k):
        y = z ** (1.0 / self.b)
        small = y < 1e-8
        ys = np.where(small, 1.0, y)
        q = np.where(small, 1.0 - y / 2.0 + y * y / 6.0, -np.expm1(-ys) / ys)
        j = 1 if self.sub else 2
        return (q ** j) * np.exp(-k * y) / self.b

    def quantile(self, u: np.ndarray) -> np.ndarray:
        z = self._quantile(u)
        y = z ** (1.0 / self.b)
        x = np.exp(-y)
        return (1.0 - x) / 2.0 if self.sub else (1.0 + x) / 2.0

    def implied_moment(self, n: int, npts: int = 4096) -> float:
        """E[(2p-1)^n] (Super) or -E[p (1-2p)^(n-1)] (Sub) through the table.

        Gauss-Legendre in the uniform variable; used to validate the table
        against the closed second-difference quotients.
        """
        nodes, weights = np.polynomial.legendre.leggauss(npts)
        u = 0.5 * (nodes + 1.0)
        w = 0.5 * weights
        p = self.quantile(u)
        if self.sub:
            vals = -p * (1.0 - 2.0 * p) ** (n - 1) if n >= 1 else np.ones_like(p)
        else:
            vals = (2.0 * p - 1.0) ** n
        return float(np.sum(w * vals))


_NU_K_TABLES: dict[tuple[Regime, float, float], _NuKTable] = {}
_NU_K_LOCK = threading.Lock()


def _nu_k_table(m: MeasureSpec) -> _NuKTable:
    key = (m.regime, m.hurst, m.k)
    tab = _NU_K_TABLES.get(key)
    if tab is None:
        with _NU_K_LOCK:
            tab = _NU_K_TABLES.get(key)
            if tab is None:
                tab = _NuKTable(m)
                _NU_K_TABLES[key] = tab
    return tab


def persistence_cdf(m: MeasureSpec, p) -> np.ndarray:
    """Analytic CDF of the persistence law (NuK: from its quadrature table)."""
    p = np.asarray(p, dtype=np.float64)
    H, k = m.hurst, m.k
    if m.family is Family.NU_K:
        tab = _nu_k_table(m)
        x = 1.0 - 2.0 * p if tab.sub else 2.0 * p - 1.0
        with np.errstate(divide="ignore"):
            y = -np.log(np.clip(x, 0.0, 1.0))
        z = y ** tab.b
        out = tab._cdf(np.clip(z, 0.0, tab.z_max))
        out = np.where(z >= tab.z_max, 1.0, out)
        return 1.0 - out if not tab.sub else out
    from scipy.special import betainc

    if m.regime is Regime.SUPER:
        b = 2.0 - 2.0 * H
        if m.family is Family.MU_K and k != 1.0:
            return betainc(k, b, np.clip(2.0 * p - 1.0, 0.0, 1.0))
        tail = np.clip(2.0 * (1.0 - p), 0.0, 1.0) ** b
        if m.family is Family.MU_PRIME_K:
            return np.clip(1.0 - tail, 0.0, 1.0) ** k
        return 1.0 - tail
    if m.regime is Regime.HALF:
        x = np.clip(2.0 * p - 1.0, 0.0, 1.0)
        return x if m.family is Family.MU_BASE else x ** k
    a = 1.0 - 2.0 * H
    if m.family is Family.MU_K and k != 1.0:
        return betainc(a, k, np.clip(2.0 * p, 0.0, 1.0))
    base = np.clip(2.0 * p, 0.0, 1.0) ** a
    if m.family is Family.MU_PRIME_K:
        return 1.0 - np.clip(1.0 - base, 0.0, 1.0) ** k
    return base

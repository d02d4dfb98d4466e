"""Estimators confronting simulated ensembles with the limit theory.

All estimators are pure functions of their input arrays; replication
(cross-run) standard errors are used throughout, and acceptance bands in
the callers are 4 standard errors unless a test states otherwise.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy import special, stats as sps

from .errors import ParameterError
from .oracle import _quad01_weighted, fbm_covariance
from .special import log_gamma

_MIN_KS_SAMPLES = 500
_MIN_RISE_RUNS = 10 ** 5


def empirical_autocovariance(increments: np.ndarray,
                             max_lag: int) -> list[tuple[float, float]]:
    """Cross-replication autocovariance of an R x N increment array.

    Returns (estimate, standard error) for lags 0..max_lag.  The
    estimator at lag n averages products x[i]*x[i+n] within each
    replication and takes the replication mean, so the standard error is
    the spread of independent per-run values.
    """
    x = np.asarray(increments, dtype=float)
    if x.ndim != 2:
        raise ParameterError("increments must be a replications x steps array")
    reps, n = x.shape
    if reps < 30:
        raise ParameterError("need at least 30 replications")
    max_lag = int(max_lag)
    if not 0 <= max_lag < n / 4:
        raise ParameterError("max_lag must satisfy 0 <= max_lag < steps/4")
    if not np.any(x):
        raise ParameterError("degenerate input: all increments are zero")
    rows = []
    for lag in range(max_lag + 1):
        per_run = np.mean(x[:, : n - lag] * x[:, lag:], axis=1)
        est = float(np.mean(per_run))
        se = float(np.std(per_run, ddof=1) / math.sqrt(reps))
        rows.append((est, se))
    return rows


def estimate_hurst(samples: Mapping[int, np.ndarray]
                   ) -> tuple[float, tuple[float, float]]:
    """Variance-scaling estimate from endpoint sums at doubling scales.

    `samples` maps a scale n to replicated values of the unnormalised
    walk-sum statistic at that scale, whose variance grows like n^{2H}.
    The estimate is half the least-squares slope of log sample variance
    against log n; the confidence interval is the 95% band from the
    regression residuals.
    """
    scales = sorted(int(s) for s in samples)
    if len(scales) < 4:
        raise ParameterError("need at least 4 scales")
    for a, b in zip(scales, scales[1:]):
        if b != 2 * a:
            raise ParameterError("scales must double: got "
                                 f"{a} followed by {b}")
    logs, logv = [], []
    for s in scales:
        vals = np.asarray(samples[s], dtype=float)
        if vals.ndim != 1 or vals.size < 100:
            raise ParameterError("need at least 100 replications per scale")
        var = float(np.var(vals, ddof=1))
        if var <= 0.0:
            raise ParameterError(f"degenerate samples at scale {s}")
        logs.append(math.log(s))
        logv.append(math.log(var))
    xs = np.array(logs)
    ys = np.array(logv)
    xc = xs - xs.mean()
    slope = float(np.dot(xc, ys) / np.dot(xc, xc))
    resid = ys - (ys.mean() + slope * xc)
    df = len(scales) - 2
    slope_se = math.sqrt(float(np.dot(resid, resid)) / df / float(np.dot(xc, xc)))
    tq = float(sps.t.ppf(0.975, df))
    h = slope / 2.0
    half = tq * slope_se / 2.0
    return h, (h - half, h + half)


def marginal_normality(samples: np.ndarray,
                       target_variance: float) -> tuple[float, float]:
    """One-sample KS test of `samples` against N(0, target_variance).

    Returns (D, p) with the p-value from the asymptotic Kolmogorov
    distribution under the standard finite-n correction.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n < _MIN_KS_SAMPLES:
        raise ParameterError(f"need at least {_MIN_KS_SAMPLES} samples")
    if target_variance <= 0.0:
        raise ParameterError("target variance must be positive")
    cdf = sps.norm.cdf(x, scale=math.sqrt(target_variance))
    grid = np.arange(1, n + 1) / n
    d = float(max(np.max(grid - cdf), np.max(cdf - (grid - 1.0 / n))))
    p = float(special.kolmogorov(d * (math.sqrt(n) + 0.12 + 0.11 / math.sqrt(n))))
    return d, p


@dataclass(frozen=True)
class RiseTailRow:
    depth: int
    probability: float
    scaled: float              # n^{2-2H} * P(L >= n)
    stated_constant: float     # Gamma(3-2H), the asymptote as stated
    exact_probability: float   # E[p^{n-1}] under the mixing measure


def _exact_rise_probability(hurst: float, depth: int) -> float:
    """P(L >= depth) = E[p^(depth-1)] under the base persistence measure."""
    if depth == 1:
        return 1.0
    if hurst == 0.5:
        return 2.0 * -math.expm1(depth * math.log(0.5)) / depth
    b = 2.0 - 2.0 * hurst

    def g(x, cx):
        return b * ((1.0 + x) / 2.0) ** (depth - 1)

    return _quad01_weighted(g, 1.0, b)


def rise_tail_report(runs: np.ndarray, hurst: float,
                     depths: Sequence[int] = (10, 20, 50, 100, 200, 500, 1000)
                     ) -> tuple[RiseTailRow, ...]:
    """Tail table of initial same-sign run lengths against the asymptote.

    Valid for persistence-dominant measures (H >= 1/2) only; censoring at
    the collection cap does not affect P(L >= n) for depths below it.
    """
    if hurst < 0.5:
        raise ParameterError("rise-length tails require H >= 1/2")
    runs = np.asarray(runs)
    if runs.size < _MIN_RISE_RUNS:
        raise ParameterError(f"need at least {_MIN_RISE_RUNS} observed runs")
    stated = math.exp(log_gamma(3.0 - 2.0 * hurst))
    rows = []
    for depth in depths:
        depth = int(depth)
        if depth < 1:
            raise ParameterError("depths must be positive")
        prob = float(np.mean(runs >= depth))
        rows.append(RiseTailRow(
            depth=depth, probability=prob,
            scaled=depth ** (2.0 - 2.0 * hurst) * prob,
            stated_constant=stated,
            exact_probability=_exact_rise_probability(hurst, depth)))
    return tuple(rows)


def window_autocovariance_theory(m, steps: int, windows: int,
                                 max_lag: int) -> np.ndarray:
    """Exact autocovariance of normalised window increments at finite N.

    The trajectory is split into `windows` equal spans of w = N/windows
    steps and the span increments are scaled by windows^H (for the H=1/2
    regime the trajectory's own sqrt(N log N) normalisation is kept, so
    values are exact but not asymptotically 1 at lag 0).  Entry `lag`
    is the exact Cov of two spans `lag` apart; the estimator bias against
    the fractional-noise asymptote vanishes only as w grows, which is why
    verdicts compare against these values and not the asymptote.
    """
    from .ensemble import scale_factor
    from .measures import autocovariance_sequence

    steps, windows = int(steps), int(windows)
    if steps % windows:
        raise ParameterError("steps must be divisible by the window count")
    w = steps // windows
    if max_lag >= windows:
        raise ParameterError("max_lag must be below the window count")
    r = autocovariance_sequence(m, (max_lag + 1) * w)
    norm = (scale_factor(m, steps, 1) * windows ** m.hurst) ** 2
    out = np.empty(max_lag + 1)
    out[0] = norm * (w + 2.0 * sum((w - d) * r[d] for d in range(1, w)))
    for lag in range(1, max_lag + 1):
        lo = lag * w
        out[lag] = norm * sum((w - abs(d - lo)) * r[d]
                              for d in range(lo - w + 1, lo + w))
    return out


def covariance_check(samples: np.ndarray, times: np.ndarray,
                     hurst: float) -> tuple[float, float]:
    """Compare an empirical covariance grid with the exact kernel.

    `samples` is replications x grid of trajectory values at `times`.
    Returns (max absolute error, max |error|/SE) over the grid, with the
    entrywise SE taken across replications of the product terms.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim != 2 or x.shape[0] < 30:
        raise ParameterError("need a replications x grid array, >= 30 rows")
    reps = x.shape[0]
    prods = x[:, :, None] * x[:, None, :]
    emp = prods.mean(axis=0)
    se = prods.std(axis=0, ddof=1) / math.sqrt(reps)
    theory = np.array([[fbm_covariance(s, t, hurst) for t in times]
                       for s in times])
    err = emp - theory
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, np.abs(err) / se, np.inf)
    return float(np.max(np.abs(err))), float(np.max(z))


@dataclass(frozen=True)
class ValidationReport:
    """Everything a validation run measured, plus recomputable verdicts."""

    autocovariance: tuple[tuple[int, float, float, float], ...]
    covariance_max_abs_error: float
    covariance_max_z: float
    hurst_estimate: float
    hurst_ci: tuple[float, float]
    ks_statistic: float | None
    ks_p_value: float | None
    rise_tail: tuple[RiseTailRow, ...]
    verdicts: tuple[tuple[str, bool], ...]
    thresholds: tuple[tuple[str, float], ...]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rise_tail"] = [asdict(r) for r in self.rise_tail]
        d["verdicts"] = dict(self.verdicts)
        d["thresholds"] = dict(self.thresholds)
        return d

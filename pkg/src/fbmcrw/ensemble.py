"""Superposition of persistence walks into one rescaled trajectory.

M independent walks each draw a persistence parameter once, then step N
times; the trajectory value at grid point i/N is the scaled sum of walk
positions after i steps.  Accumulation is exact-order deterministic: walks
are Kahan-summed in index order inside fixed blocks of 1024, and block
partials combine along a fixed binary tree, so results are bit-identical
for any thread count, chunk length, or kernel backend.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import NumericError, ParameterError
from .measures import (MeasureSpec, Regime, sample_persistence_block,
                       scaling_constant)
from .rng import derive_streams, uniform_column

_BLOCK = 1024  # walks per Kahan block; fixed so reductions never reassociate


@dataclass(frozen=True)
class EnsembleConfig:
    measure: MeasureSpec
    steps: int
    walks: int
    master_seed: int

    def __post_init__(self):
        if int(self.steps) < 1:
            raise ParameterError("steps must be a positive integer")
        if int(self.walks) < 1:
            raise ParameterError("walk count must be a positive integer")


@dataclass(frozen=True)
class EnsembleTrajectory:
    """Trajectory values on t_i = i/N for i = 0..N, with values[0] = 0."""

    values: np.ndarray
    config: EnsembleConfig
    scale: float

    @property
    def times(self) -> np.ndarray:
        n = self.config.steps
        return np.arange(n + 1) / n


def scale_factor(m: MeasureSpec, steps: int, walks: int) -> float:
    """Normalisation applied to the summed walk positions."""
    steps, walks = int(steps), int(walks)
    if steps < 1 or walks < 1:
        raise ParameterError("steps and walk count must be positive")
    c = scaling_constant(m).c
    if m.regime is Regime.HALF:
        if steps == 1:
            raise ParameterError(
                "H = 1/2 scaling uses sqrt(N log N), undefined at N = 1")
        return c / (math.sqrt(steps * math.log(steps)) * math.sqrt(walks))
    return c / (steps ** m.hurst * math.sqrt(walks))


def _thread_count() -> int:
    raw = os.environ.get("FBMCRW_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ParameterError(f"FBMCRW_THREADS must be an integer, got {raw!r}")
    if n < 1:
        raise ParameterError("FBMCRW_THREADS must be at least 1")
    return n


def _pairwise_rows(rows: np.ndarray) -> np.ndarray:
    """Sum the rows along a fixed binary tree (adjacent pairs per level)."""
    while rows.shape[0] > 1:
        half = rows.shape[0] // 2
        merged = rows[0:2 * half:2] + rows[1:2 * half:2]
        if rows.shape[0] % 2:
            merged = np.concatenate([merged, rows[-1:]])
        rows = merged
    return rows[0]


class _EnsembleRun:
    """Walk state for one ensemble, advanced chunk by chunk."""

    def __init__(self, cfg: EnsembleConfig):
        m = cfg.measure
        self.cfg = cfg
        self.scale = scale_factor(m, cfg.steps, cfg.walks)
        self.is_y = m.regime is Regime.SUB
        count = cfg.walks
        self.seed, self.gamma = derive_streams(cfg.master_seed, 0, count)
        t0 = np.ones(count, dtype=np.uint64)
        p, t_after = sample_persistence_block(m, self.seed, self.gamma, t0)
        u = uniform_column(self.seed, self.gamma, t_after)
        self.sign = np.where(u < 0.5, 1, -1).astype(np.int64)
        self.t_next = t_after + np.uint64(1)
        self.p = np.ascontiguousarray(p)
        self.v = np.ascontiguousarray(1.0 / np.sqrt(self.p)) if self.is_y else None
        self.pos = np.zeros(count)
        self.blocks = [slice(b, min(b + _BLOCK, count))
                       for b in range(0, count, _BLOCK)]
        # chunk length only trades Python overhead against buffer size;
        # results are chunking-independent, state stays O(M)
        self.chunk = max(16, min(1024, 4 * count))

    def _advance_block(self, sl: slice, length: int, out: np.ndarray,
                       comp: np.ndarray) -> None:
        if self.is_y:
            kernels.y_chunk(self.seed[sl], self.gamma[sl], self.t_next[sl],
                            self.p[sl], self.v[sl], self.sign[sl],
                            self.pos[sl], length, out, comp)
        else:
            kernels.crw_chunk(self.seed[sl], self.gamma[sl], self.t_next[sl],
                              self.p[sl], self.sign[sl], self.pos[sl],
                              length, out, comp)

    def chunks(self):
        """Yield consecutive scaled value chunks covering steps 1..N."""
        n_blocks = len(self.blocks)
        sums = np.empty((n_blocks, self.chunk))
        comps = np.empty((n_blocks, self.chunk))
        threads = _thread_count()
        pool = ThreadPoolExecutor(threads) if threads > 1 else None
        try:
            remaining = self.cfg.steps
            while remaining > 0:
                length = min(self.chunk, remaining)
                out = sums[:, :length]
                comp = comps[:, :length]
                out[:] = 0.0
                comp[:] = 0.0
                if pool is None:
                    for b, sl in enumerate(self.blocks):
                        self._advance_block(sl, length, out[b], comp[b])
                else:
                    futures = [pool.submit(self._advance_block, sl, length,
                                           out[b], comp[b])
                               for b, sl in enumerate(self.blocks)]
                    for f in futures:
                        f.result()
                yield _pairwise_rows(out) * self.scale
                remaining -= length
        finally:
            if pool is not None:
                pool.shutdown(wait=True)


def simulate_fbm(cfg: EnsembleConfig) -> EnsembleTrajectory:
    """Run the full ensemble and return the trajectory on the whole grid."""
    run = _EnsembleRun(cfg)
    values = np.empty(cfg.steps + 1)
    values[0] = 0.0
    at = 1
    for chunk in run.chunks():
        values[at:at + chunk.size] = chunk
        at += chunk.size
    if not np.all(np.isfinite(values)):
        raise NumericError("trajectory contains non-finite values")
    return EnsembleTrajectory(values=values, config=cfg, scale=run.scale)


def stream_fbm(cfg: EnsembleConfig, consumer) -> None:
    """Deliver values[1..N] one at a time to `consumer`, holding O(M) state.

    Emitted values equal simulate_fbm's bit for bit.  Exceptions raised by
    the consumer propagate immediately; no further values are produced.
    """
    run = _EnsembleRun(cfg)
    for chunk in run.chunks():
        for value in chunk:
            consumer(float(value))

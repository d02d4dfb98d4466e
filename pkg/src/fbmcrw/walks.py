"""Single-walk step processes and their quenched laws.

Two walk kinds share one state record and draw protocol.  "CRW" is a unit
sign walk that repeats its previous increment with probability p; "Y" is
the normalised difference of two such walks sharing their sign sequence,
which reduces to: emit sign/sqrt(p) and flip with probability p, else emit
zero.  Every walk consumes one dedicated uniform for its initial sign
(u < 1/2 means +1) and then exactly one uniform per step (u < p means
repeat/emit), so a walk's draw positions are independent of its kind.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ._backend import kernels
from .errors import ParameterError
from .measures import MeasureSpec, sample_persistence_block
from .rng import Stream, derive_streams

_KINDS = ("CRW", "Y")


@dataclass(frozen=True)
class WalkState:
    """Immutable per-walk state between steps.

    last_sign is 0 before the first step; afterwards it is the current
    sign s in {-1, +1} (for CRW the previous increment, for Y the sign the
    next emission would carry).
    """

    p: float
    last_sign: int = 0
    position: float = 0.0
    step_index: int = 0


def _start_sign(rng: Stream) -> int:
    return 1 if rng.uniform() < 0.5 else -1


def crw_next(state: WalkState, rng: Stream) -> tuple[WalkState, float]:
    """Advance a sign walk one step; returns (new state, increment)."""
    s = state.last_sign if state.last_sign else _start_sign(rng)
    if rng.uniform() >= state.p:
        s = -s
    return replace(state, last_sign=s, position=state.position + s,
                   step_index=state.step_index + 1), float(s)


def y_next(state: WalkState, rng: Stream) -> tuple[WalkState, float]:
    """Advance a paired-difference walk one step; returns (new state, increment)."""
    s = state.last_sign if state.last_sign else _start_sign(rng)
    if rng.uniform() < state.p:
        inc = s / math.sqrt(state.p)
        s = -s
    else:
        inc = 0.0
    return replace(state, last_sign=s, position=state.position + inc,
                   step_index=state.step_index + 1), inc


def run_walk(kind: str, p: float, steps: int, rng: Stream) -> np.ndarray:
    """Positions of one quenched walk, array of length steps + 1."""
    if kind not in _KINDS:
        raise ParameterError(f"walk kind must be one of {_KINDS}")
    if not np.isfinite(p):
        raise ParameterError("persistence must be finite")
    if kind == "Y" and not 0.0 < p <= 1.0:
        raise ParameterError("Y walks need persistence in (0, 1]")
    if kind == "CRW" and not 0.0 <= p <= 1.0:
        raise ParameterError("persistence must lie in [0, 1]")
    steps = int(steps)
    if steps < 0:
        raise ParameterError("steps must be nonnegative")
    advance = crw_next if kind == "CRW" else y_next
    state = WalkState(p=float(p))
    positions = np.zeros(steps + 1)
    for i in range(steps):
        state, _ = advance(state, rng)
        positions[i + 1] = state.position
    return positions


def first_rise_lengths(measure: MeasureSpec, count: int, master_seed: int,
                       cap: int = 2048) -> np.ndarray:
    """Initial same-sign run length of `count` independent sign walks.

    Each walk draws its own persistence from `measure`.  Runs are censored
    at `cap`; under persistence-heavy measures the run length has infinite
    mean, so censoring is unavoidable and harmless for tail statistics at
    depths below the cap.
    """
    count = int(count)
    if count <= 0:
        raise ParameterError("count must be positive")
    cap = int(cap)
    if cap < 1:
        raise ParameterError("cap must be at least 1")
    seed, gamma = derive_streams(master_seed, 0, count)
    t0 = np.ones(count, dtype=np.uint64)
    p, t_after = sample_persistence_block(measure, seed, gamma, t0)
    # skip the sign draw and the first step's own uniform: the run starts
    # at length 1 regardless and extends while steps 2, 3, ... repeat
    t_first = t_after + np.uint64(2)
    return kernels.crw_leading_runs(seed, gamma, t_first,
                                    np.ascontiguousarray(p), cap)

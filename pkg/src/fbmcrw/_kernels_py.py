"""NumPy implementations of the per-walk simulation kernels.

Twin of the compiled module ``_kernels``: every function must produce
bit-identical results.  That holds because both sides evaluate the same
IEEE-754 operations on the same values, and walks enter each time step's
Kahan accumulator in index order (the vector form compensates over the
time axis while looping walks, which is elementwise identical to the
scalar loop).
"""

from __future__ import annotations

import numpy as np

from .rng import uniforms_at


def _row(seed, gamma, t, length: int) -> np.ndarray:
    return uniforms_at(seed.reshape(1), gamma.reshape(1), t.reshape(1), length)[0]


def crw_chunk(seed, gamma, t_next, p, sign, pos, length, out, comp):
    """Advance a block of correlated sign walks by `length` steps.

    Per-walk state (sign, pos, t_next) is updated in place.  out/comp are
    the Kahan sum and compensation of the block's position total at each
    of the `length` consecutive time steps.
    """
    for j in range(seed.shape[0]):
        u = _row(seed[j], gamma[j], t_next[j], length)
        flip = np.where(u < p[j], 1, -1)
        signs = sign[j] * np.cumprod(flip)
        row = pos[j] + np.cumsum(signs, dtype=np.float64)
        y = row - comp
        t = out + y
        comp[:] = (t - out) - y
        out[:] = t
        sign[j] = signs[-1]
        pos[j] = row[-1]
        t_next[j] += np.uint64(length)


def y_chunk(seed, gamma, t_next, p, v, sign, pos, length, out, comp):
    """Advance a block of paired-difference walks by `length` steps.

    With probability p a walk emits sign*v and flips its sign, otherwise
    it emits zero; positions alternate between exactly two float values,
    so the cumulative sums below are exact.
    """
    for j in range(seed.shape[0]):
        u = _row(seed[j], gamma[j], t_next[j], length)
        emit = u < p[j]
        cum = np.cumprod(np.where(emit, -1, 1))
        before = sign[j] * np.concatenate(([1], cum[:-1]))
        delta = np.where(emit, before * v[j], 0.0)
        row = pos[j] + np.cumsum(delta)
        y = row - comp
        t = out + y
        comp[:] = (t - out) - y
        out[:] = t
        sign[j] = sign[j] * cum[-1]
        pos[j] = row[-1]
        t_next[j] += np.uint64(length)


def crw_leading_runs(seed, gamma, t_first, p, cap):
    """Length of each walk's initial same-sign run, censored at `cap`."""
    m = seed.shape[0]
    runs = np.empty(m, dtype=np.int64)
    for j in range(m):
        rep = _row(seed[j], gamma[j], t_first[j], cap - 1) < p[j]
        runs[j] = cap if rep.all() else 1 + int(np.argmin(rep))
    return runs

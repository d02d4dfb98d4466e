"""Counter-based splittable random streams.

Every walk owns a private stream derived from (master_seed, walk_index), so
walks can be generated in any order, on any number of threads, chunk by
chunk, and still consume exactly the same 64-bit outputs.  The scheme is the
SplitMix64 finalizer used as a counter hash (the SplittableRandom design):

    seed_j  = mix64(master + (j + 1) * PHI)         (mod 2^64)
    gamma_j = mix64(seed_j ^ PHI) | 1               weak gammas repaired
    x_t     = mix64(seed_j + t * gamma_j)           t = 1, 2, ...

where PHI = 0x9E3779B97F4A7C15 and mix64 is

    z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27;  z *= 0x94D049BB133111EB
    z ^= z >> 31

A gamma is "weak" when popcount(g ^ (g >> 1)) < 24; it is xored with
0xAAAA...AA (which preserves oddness).  Uniform mappings:

    half-open [0, 1):  (x >> 11) * 2^-53          (walk steps, sign draws)
    open (0, 1):       ((x >> 11) + 0.5) * 2^-53  (measure and normal draws)

The open map never returns 0 or 1, so log/pow transforms are safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

U64 = np.uint64
PHI = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_AA = 0xAAAAAAAAAAAAAAAA
_MASK = (1 << 64) - 1
TWO_NEG53 = 1.0 / 9007199254740992.0


def mix64(z: int) -> int:
    z &= _MASK
    z ^= z >> 30
    z = (z * _M1) & _MASK
    z ^= z >> 27
    z = (z * _M2) & _MASK
    z ^= z >> 31
    return z


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    z ^= z >> U64(30)
    z *= U64(_M1)
    z ^= z >> U64(27)
    z *= U64(_M2)
    z ^= z >> U64(31)
    return z


def _popcount64_array(x: np.ndarray) -> np.ndarray:
    # SWAR popcount; avoids depending on np.bitwise_count (numpy >= 2 only)
    x = x.astype(np.uint64, copy=True)
    x -= (x >> U64(1)) & U64(0x5555555555555555)
    x = (x & U64(0x3333333333333333)) + ((x >> U64(2)) & U64(0x3333333333333333))
    x = (x + (x >> U64(4))) & U64(0x0F0F0F0F0F0F0F0F)
    return (x * U64(0x0101010101010101)) >> U64(56)


def derive_streams(master_seed: int, start: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (seed, gamma) arrays for walk indices start..start+count-1."""
    j = np.arange(start, start + count, dtype=np.uint64)
    seed = mix64_array(U64(master_seed & _MASK) + (j + U64(1)) * U64(PHI))
    gamma = mix64_array(seed ^ U64(PHI)) | U64(1)
    weak = _popcount64_array(gamma ^ (gamma >> U64(1))) < 24
    if weak.any():
        gamma[weak] ^= U64(_AA)
    return seed, gamma


def uniforms_at(seed: np.ndarray, gamma: np.ndarray, t0: np.ndarray, length: int,
                open_interval: bool = False) -> np.ndarray:
    """Matrix u[j, i] of uniforms at counters t0[j] + i for i < length."""
    t = t0[:, None].astype(np.uint64) + np.arange(length, dtype=np.uint64)[None, :]
    x = mix64_array(seed[:, None].astype(np.uint64) + t * gamma[:, None].astype(np.uint64))
    u = (x >> U64(11)).astype(np.float64)
    if open_interval:
        u += 0.5
    return u * TWO_NEG53


def uniform_column(seed: np.ndarray, gamma: np.ndarray, t: np.ndarray,
                   open_interval: bool = False) -> np.ndarray:
    """One uniform per stream, at per-stream counters t."""
    x = mix64_array(seed.astype(np.uint64) + t.astype(np.uint64) * gamma.astype(np.uint64))
    u = (x >> U64(11)).astype(np.float64)
    if open_interval:
        u += 0.5
    return u * TWO_NEG53


@dataclass
class Stream:
    """Scalar view of one counter-based stream; `t` is the next counter."""

    seed: int
    gamma: int
    t: int = field(default=1)

    def next_u64(self) -> int:
        x = mix64((self.seed + self.t * self.gamma) & _MASK)
        self.t += 1
        return x

    def uniform(self) -> float:
        """Half-open [0, 1); used for step and sign draws."""
        return (self.next_u64() >> 11) * TWO_NEG53

    def uniform_open(self) -> float:
        """Open (0, 1); used for measure and normal draws."""
        return ((self.next_u64() >> 11) + 0.5) * TWO_NEG53

    def skip(self, n: int) -> None:
        self.t += int(n)

    @property
    def draws(self) -> int:
        return self.t - 1


def stream_for_walk(master_seed: int, walk_index: int) -> Stream:
    seed, gamma = derive_streams(master_seed, walk_index, 1)
    return Stream(int(seed[0]), int(gamma[0]))


def replication_seed(master_seed: int, replication: int) -> int:
    """Derived master seed for replication r, disjoint from walk streams."""
    z = (master_seed ^ 0x5851F42D4C957F2D) + (replication + 1) * PHI
    return mix64(z & _MASK)

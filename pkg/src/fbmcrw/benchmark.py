"""Timing comparison of the compiled kernels against the NumPy fallback.

Run as ``python -m fbmcrw.benchmark``.  Both backends are driven over the
same derived streams and persistence draws, the outputs are checked for
bit-identity, and the throughput of each is printed.  Exits with status 1
if only one backend is importable (the comparison is then meaningless).
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from ._backend import load_backend
from .measures import Family, make_measure, sample_persistence_block
from .rng import derive_streams, uniform_column


def _workload(kernels, seed, gamma, t_start, p, length: int, chunks: int,
              repeats: int):
    """Best-of-`repeats` wall time plus the final accumulator state."""
    walks = seed.shape[0]
    best = float("inf")
    out = comp = None
    for _ in range(repeats):
        sign = np.where(uniform_column(seed, gamma, t_start - 1) < 0.5,
                        1, -1).astype(np.int64)
        pos = np.zeros(walks)
        t_next = t_start.copy()
        out = np.zeros(length)
        comp = np.zeros(length)
        t0 = time.perf_counter()
        for _ in range(chunks):
            kernels.crw_chunk(seed, gamma, t_next, p, sign, pos,
                              length, out, comp)
        best = min(best, time.perf_counter() - t0)
    return best, out, comp


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m fbmcrw.benchmark",
        description="compare the compiled and pure NumPy walk kernels")
    parser.add_argument("--walks", type=int, default=512)
    parser.add_argument("--chunk-length", type=int, default=1024)
    parser.add_argument("--chunks", type=int, default=64)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--hurst", type=float, default=0.75)
    parser.add_argument("--seed", type=int, default=2024)
    args = parser.parse_args(argv)

    backends = {}
    for name in ("compiled", "python"):
        try:
            backends[name] = load_backend(name)[0]
        except ImportError:
            pass
    if len(backends) < 2:
        only = ", ".join(backends) or "none"
        print(f"need both backends for a comparison (importable: {only})")
        return 1

    measure = make_measure(Family.MU_BASE, args.hurst, 1.0)
    seed, gamma = derive_streams(args.seed, 0, args.walks)
    t0 = np.ones(args.walks, dtype=np.uint64)
    p, t_after = sample_persistence_block(measure, seed, gamma, t0)
    t_start = t_after + np.uint64(2)

    total = args.walks * args.chunk_length * args.chunks
    print(f"walks={args.walks} chunk_length={args.chunk_length} "
          f"chunks={args.chunks} steps={total}")

    results = {}
    for name, kernels in backends.items():
        elapsed, out, comp = _workload(kernels, seed, gamma, t_start, p,
                                       args.chunk_length, args.chunks,
                                       args.repeats)
        results[name] = (elapsed, out, comp)
        print(f"{name:9s} {elapsed:8.4f} s   {total / elapsed:12.3e} steps/s")

    (fast, f_out, f_comp), (slow, s_out, s_comp) = (results["compiled"],
                                                    results["python"])
    identical = (np.array_equal(f_out, s_out)
                 and np.array_equal(f_comp, s_comp))
    print(f"speedup   {slow / fast:8.2f}x   outputs identical: "
          f"{'yes' if identical else 'NO'}")
    return 0 if identical else 1


if __name__ == "__main__":
    sys.exit(main())

import itertools
import math

import numpy as np
import pytest

from fbmcrw import (Family, ParameterError, Stream, WalkState, crw_next,
                    derive_streams, enumerate_quenched, first_rise_lengths,
                    make_measure, run_walk, stream_for_walk, y_next)
from fbmcrw._backend import kernels
from fbmcrw.measures import sample_persistence, sample_persistence_block


def test_crw_increments_are_unit_signs():
    st = stream_for_walk(3, 0)
    positions = run_walk("CRW", 0.7, 200, st)
    steps = np.diff(positions)
    assert set(steps.tolist()) <= {-1.0, 1.0}
    assert positions[0] == 0.0
    assert st.draws == 201  # one sign draw plus one per step


def test_y_positions_two_valued():
    for p in (0.3, 0.8):
        st = stream_for_walk(11, 4)
        positions = run_walk("Y", p, 500, st)
        levels = set(positions.tolist())
        assert len(levels) == 2 and 0.0 in levels
        other = (levels - {0.0}).pop()
        assert abs(other) == pytest.approx(1.0 / math.sqrt(p), rel=1e-15)


def test_run_walk_validation():
    st = stream_for_walk(0, 0)
    with pytest.raises(ParameterError):
        run_walk("Z", 0.5, 10, st)
    with pytest.raises(ParameterError):
        run_walk("Y", 0.0, 10, st)
    with pytest.raises(ParameterError):
        run_walk("CRW", 1.5, 10, st)
    with pytest.raises(ParameterError):
        run_walk("CRW", 0.5, -1, st)


def test_degenerate_persistence():
    st = stream_for_walk(21, 0)
    pos = run_walk("CRW", 1.0, 50, st)  # never flips
    assert abs(pos[-1]) == 50.0
    st = stream_for_walk(21, 1)
    pos = run_walk("CRW", 0.0, 50, st)  # alternates deterministically
    assert pos[-1] in (0.0, -1.0, 1.0)
    assert np.abs(pos).max() <= 1.0
    st = stream_for_walk(21, 2)
    pos = run_walk("Y", 1.0, 6, st)  # emits every step
    assert np.array_equal(np.abs(np.diff(pos)), np.ones(6))


def _full_alternating_moment(p: float, pairs: int, indices) -> float:
    """E[prod delta at 1-based pair indices] from the unreduced walk.

    The unreduced construction takes 2*`pairs` unit steps: within pair j
    the second step persists with probability p, and each new pair opens
    with a deterministic reversal of the previous step.  delta_j is the
    pair sum over 2 sqrt(p).
    """
    total = 0.0
    for s0 in (1.0, -1.0):
        for bits in itertools.product((1, 0), repeat=pairs):
            prob = 0.5
            steps = []
            for j, persist in enumerate(bits):
                first = s0 if j == 0 else -steps[-1]
                second = first if persist else -first
                prob *= p if persist else 1.0 - p
                steps += [first, second]
            delta = [(steps[2 * j] + steps[2 * j + 1]) / (2.0 * math.sqrt(p))
                     for j in range(pairs)]
            val = 1.0
            for i in indices:
                val *= delta[i - 1]
            total += prob * val
    return total


def test_reduced_recursion_matches_full_construction():
    # the package's pair process must agree in law with the explicit
    # alternating walk it abbreviates: all joint moments over 6 pairs
    for p in (0.2, 0.5, 0.9):
        for idx in [(1, 2), (2, 5), (1, 6), (3, 3), (1, 2, 3, 4),
                    (1, 3, 4, 6), (2, 2, 5, 5), (4, 4, 4, 4), (1, 2, 2, 3)]:
            full = _full_alternating_moment(p, 6, idx)
            reduced = enumerate_quenched("Y", p, 6, idx)
            assert reduced == pytest.approx(full, abs=1e-12), (p, idx)


def test_fourth_moment_factorizations():
    p = 0.375
    rho = 2.0 * p - 1.0
    for a, b, c, d in itertools.combinations(range(1, 9), 4):
        got = enumerate_quenched("CRW", p, 10, (a, b, c, d))
        assert got == pytest.approx(rho ** ((b - a) + (d - c)), abs=1e-12)
        got = enumerate_quenched("Y", p, 10, (a, b, c, d))
        want = (enumerate_quenched("Y", p, 10, (a, b))
                * enumerate_quenched("Y", p, 10, (c, d)))
        assert got == pytest.approx(want, abs=1e-12)
    assert enumerate_quenched("Y", p, 8, (2, 2, 2, 2)) == pytest.approx(
        1.0 / p, abs=1e-12)


def test_step_api_matches_kernels():
    m = make_measure(Family.MU_K, 0.75, 1.0)
    walks, steps = 5, 67
    seed, gamma = derive_streams(12345, 0, walks)
    p, t_after = sample_persistence_block(m, seed, gamma,
                                          np.ones(walks, dtype=np.uint64))
    for j in range(walks):
        st = Stream(int(seed[j]), int(gamma[j]))
        assert sample_persistence(m, st) == p[j]
        scalar = run_walk("CRW", p[j], steps, st)

        out = np.zeros(steps)
        comp = np.zeros(steps)
        sign = np.zeros(1, dtype=np.int64)
        # kernel protocol: sign bit from the dedicated draw at t_after
        from fbmcrw.rng import uniform_column
        sign[0] = 1 if uniform_column(seed[j:j + 1], gamma[j:j + 1],
                                      t_after[j:j + 1])[0] < 0.5 else -1
        kernels.crw_chunk(seed[j:j + 1], gamma[j:j + 1],
                          t_after[j:j + 1] + np.uint64(1),
                          p[j:j + 1], sign, np.zeros(1), steps, out, comp)
        assert np.array_equal(scalar[1:], out)


def test_y_step_api_matches_kernels():
    m = make_measure(Family.MU_K, 0.25, 1.0)
    walks, steps = 4, 53
    seed, gamma = derive_streams(777, 0, walks)
    p, t_after = sample_persistence_block(m, seed, gamma,
                                          np.ones(walks, dtype=np.uint64))
    from fbmcrw.rng import uniform_column
    for j in range(walks):
        st = Stream(int(seed[j]), int(gamma[j]))
        sample_persistence(m, st)
        scalar = run_walk("Y", p[j], steps, st)

        out = np.zeros(steps)
        comp = np.zeros(steps)
        sign = np.zeros(1, dtype=np.int64)
        sign[0] = 1 if uniform_column(seed[j:j + 1], gamma[j:j + 1],
                                      t_after[j:j + 1])[0] < 0.5 else -1
        v = np.array([1.0 / math.sqrt(p[j])])
        kernels.y_chunk(seed[j:j + 1], gamma[j:j + 1],
                        t_after[j:j + 1] + np.uint64(1),
                        p[j:j + 1], v, sign, np.zeros(1), steps, out, comp)
        assert np.array_equal(scalar[1:], out)


def test_state_record_progression():
    st = stream_for_walk(1, 0)
    state = WalkState(p=0.6)
    state, inc = crw_next(state, st)
    assert state.step_index == 1 and inc in (-1.0, 1.0)
    assert state.last_sign in (-1, 1)
    state2, inc2 = y_next(WalkState(p=0.6), stream_for_walk(1, 0))
    assert state2.step_index == 1
    assert inc2 in (0.0, 1.0 / math.sqrt(0.6), -1.0 / math.sqrt(0.6))


def test_first_rise_lengths_match_exact_tail():
    m = make_measure(Family.MU_BASE, 0.75, 1.0)
    count = 100_000
    runs = first_rise_lengths(m, count, 2718)
    assert runs.shape == (count,)
    assert runs.min() >= 1 and runs.max() <= 2048
    # P(L >= n) = E[p^(n-1)]; check a few depths at 5 sigma
    from fbmcrw.stats import _exact_rise_probability
    for n in (2, 5, 20, 100):
        want = _exact_rise_probability(0.75, n)
        got = float(np.mean(runs >= n))
        se = math.sqrt(want * (1.0 - want) / count)
        assert abs(got - want) <= 5.0 * se, n


def test_first_rise_validation():
    m = make_measure(Family.MU_BASE, 0.75, 1.0)
    with pytest.raises(ParameterError):
        first_rise_lengths(m, 0, 1)
    with pytest.raises(ParameterError):
        first_rise_lengths(m, 10, 1, cap=0)
    assert first_rise_lengths(m, 10, 1, cap=1).max() == 1

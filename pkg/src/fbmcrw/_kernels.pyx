# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-walk simulation kernels.

Must stay bit-identical to the NumPy twin ``_kernels_py``: same counter
RNG, same IEEE operation order, walks added to each time step's Kahan
accumulator in index order.  Do not compile with fast-math; the Kahan
correction term would be optimised away.
"""

import numpy as np

from libc.stdint cimport int64_t, uint64_t

cdef double TWO_NEG53 = 1.1102230246251565e-16  # 2**-53


cdef inline uint64_t _mix64(uint64_t z) nogil:
    z ^= z >> 30
    z *= <uint64_t>0xBF58476D1CE4E5B9
    z ^= z >> 27
    z *= <uint64_t>0x94D049BB133111EB
    z ^= z >> 31
    return z


cdef inline double _uniform(uint64_t seed, uint64_t gamma, uint64_t t) nogil:
    return <double>(_mix64(seed + t * gamma) >> 11) * TWO_NEG53


def crw_chunk(const uint64_t[::1] seed, const uint64_t[::1] gamma,
              uint64_t[::1] t_next, const double[::1] p, int64_t[::1] sign,
              double[::1] pos, Py_ssize_t length, double[::1] out,
              double[::1] comp):
    """Advance a block of correlated sign walks by `length` steps."""
    cdef Py_ssize_t j, i, m = seed.shape[0]
    cdef uint64_t sd, gm, t
    cdef double pj, q, s, u, y, acc
    with nogil:
        for j in range(m):
            sd = seed[j]
            gm = gamma[j]
            t = t_next[j]
            pj = p[j]
            s = <double>sign[j]
            q = pos[j]
            for i in range(length):
                u = _uniform(sd, gm, t)
                t += 1
                if u >= pj:
                    s = -s
                q += s
                y = q - comp[i]
                acc = out[i] + y
                comp[i] = (acc - out[i]) - y
                out[i] = acc
            sign[j] = <int64_t>s
            pos[j] = q
            t_next[j] = t


def y_chunk(const uint64_t[::1] seed, const uint64_t[::1] gamma,
            uint64_t[::1] t_next, const double[::1] p, const double[::1] v,
            int64_t[::1] sign, double[::1] pos, Py_ssize_t length,
            double[::1] out, double[::1] comp):
    """Advance a block of paired-difference walks by `length` steps."""
    cdef Py_ssize_t j, i, m = seed.shape[0]
    cdef uint64_t sd, gm, t
    cdef double pj, vj, q, s, u, y, acc
    with nogil:
        for j in range(m):
            sd = seed[j]
            gm = gamma[j]
            t = t_next[j]
            pj = p[j]
            vj = v[j]
            s = <double>sign[j]
            q = pos[j]
            for i in range(length):
                u = _uniform(sd, gm, t)
                t += 1
                if u < pj:
                    q += s * vj
                    s = -s
                y = q - comp[i]
                acc = out[i] + y
                comp[i] = (acc - out[i]) - y
                out[i] = acc
            sign[j] = <int64_t>s
            pos[j] = q
            t_next[j] = t


def crw_leading_runs(const uint64_t[::1] seed, const uint64_t[::1] gamma,
                     const uint64_t[::1] t_first, const double[::1] p,
                     Py_ssize_t cap):
    """Length of each walk's initial same-sign run, censored at `cap`."""
    cdef Py_ssize_t j, m = seed.shape[0]
    cdef int64_t run
    cdef uint64_t t
    runs = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] rv = runs
    with nogil:
        for j in range(m):
            t = t_first[j]
            run = 1
            while run < cap:
                if _uniform(seed[j], gamma[j], t) < p[j]:
                    run += 1
                    t += 1
                else:
                    break
            rv[j] = run
    return runs

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: LPF sieve, discrete-log tables, character scans.

Contracts match charlab._kernels.pure; that module is the reference
for argument layouts.  The scan here accumulates with Kahan
compensation in a scalar loop, the fallback uses vectorised cumsum.
"""

from libc.math cimport sqrt

import numpy as np


def lpf_sieve(long long limit):
    lpf_np = np.zeros(limit + 1, dtype=np.int32)
    cdef int[::1] lpf = lpf_np
    cdef long long p, j
    with nogil:
        for j in range(2, limit + 1, 2):
            lpf[j] = 2
        for p in range(3, limit + 1, 2):
            if lpf[p] == 0:
                lpf[p] = <int> p
                # even multiples are already marked; step 2p stays odd
                j = p * p
                while j <= limit:
                    if lpf[j] == 0:
                        lpf[j] = <int> p
                    j += 2 * p
    return lpf_np


def dlog_table(long long base, long long modulus, long long order):
    table_np = np.full(modulus, -1, dtype=np.int32)
    cdef int[::1] table = table_np
    cdef long long x = 1 % modulus, i
    for i in range(order):
        table[x] = <int> i
        x = (x * base) % modulus
    return table_np


def family_max_mult(lpf_in, cof_in, coprime_in, plist_in, pang_in,
                    long long R, cos_in, sin_in):
    """Multiplicative-extension scan: angles at primes are given, angles
    at composites follow from ang(n) = ang(lpf) + ang(cofactor), and the
    prefix sums are accumulated plainly (no compensation) so the route
    is numerically distinct from family_max_prefix."""
    lpf_np = np.ascontiguousarray(lpf_in, dtype=np.int32)
    cof_np = np.ascontiguousarray(cof_in, dtype=np.int32)
    cop_np = np.ascontiguousarray(coprime_in, dtype=np.uint8)
    plist_np = np.ascontiguousarray(plist_in, dtype=np.int64)
    pang_np = np.ascontiguousarray(pang_in, dtype=np.int64)
    cos_np = np.ascontiguousarray(cos_in, dtype=np.float64)
    sin_np = np.ascontiguousarray(sin_in, dtype=np.float64)
    cdef int[::1] lpf = lpf_np
    cdef int[::1] cof = cof_np
    cdef unsigned char[::1] coprime = cop_np
    cdef long long[::1] plist = plist_np
    cdef long long[:, ::1] pang = pang_np
    cdef double[::1] cos_t = cos_np
    cdef double[::1] sin_t = sin_np
    cdef Py_ssize_t q = lpf.shape[0] - 1
    cdef Py_ssize_t nchars = pang.shape[1]
    cdef Py_ssize_t nprimes = plist.shape[0]
    ang_np = np.zeros(q + 1, dtype=np.int64)
    cdef long long[::1] ang = ang_np
    M_np = np.empty(nchars, dtype=np.float64)
    arg_np = np.empty(nchars, dtype=np.int64)
    cdef double[::1] M = M_np
    cdef long long[::1] arg = arg_np
    cdef Py_ssize_t c, i, n
    cdef long long a, best_t
    cdef double sre, sim, m2, best
    with nogil:
        for c in range(nchars):
            for i in range(nprimes):
                ang[plist[i]] = pang[i, c]
            for n in range(4, q + 1):
                if lpf[n] != <int> n:
                    a = ang[lpf[n]] + ang[cof[n]]
                    if a >= R:
                        a -= R
                    ang[n] = a
            sre = sim = 0.0
            best = -1.0
            best_t = 0
            for n in range(1, q + 1):
                if coprime[n]:
                    a = ang[n]
                    sre += cos_t[a]
                    sim += sin_t[a]
                m2 = sre * sre + sim * sim
                if m2 > best:
                    best = m2
                    best_t = n
            M[c] = sqrt(best)
            arg[c] = best_t
    return M_np, arg_np


def family_max_prefix(dtab_in, ewmat_in, long long R, cos_in, sin_in):
    dtab_np = np.ascontiguousarray(dtab_in, dtype=np.int32)
    ewmat_np = np.ascontiguousarray(ewmat_in, dtype=np.int64)
    cos_np = np.ascontiguousarray(cos_in, dtype=np.float64)
    sin_np = np.ascontiguousarray(sin_in, dtype=np.float64)
    cdef int[:, ::1] dtab = dtab_np
    cdef long long[:, ::1] ewmat = ewmat_np
    cdef double[::1] cos_t = cos_np
    cdef double[::1] sin_t = sin_np
    cdef Py_ssize_t q = dtab.shape[0]
    cdef Py_ssize_t ngens = dtab.shape[1]
    cdef Py_ssize_t nchars = ewmat.shape[0]
    M_np = np.empty(nchars, dtype=np.float64)
    arg_np = np.empty(nchars, dtype=np.int64)
    cdef double[::1] M = M_np
    cdef long long[::1] arg = arg_np
    cdef Py_ssize_t c, t, i
    cdef long long acc, a, d
    cdef bint zero
    cdef double sre, sim, cre, cim, y, tt, m2, best, v
    cdef long long best_t
    with nogil:
        for c in range(nchars):
            sre = sim = cre = cim = 0.0
            best = -1.0
            best_t = 0
            for t in range(q):
                zero = False
                acc = 0
                for i in range(ngens):
                    d = dtab[t, i]
                    if d < 0:
                        zero = True
                        break
                    acc += ewmat[c, i] * d
                if not zero:
                    a = acc % R
                    # Kahan-compensated accumulation, real then imaginary.
                    v = cos_t[a]
                    y = v - cre
                    tt = sre + y
                    cre = (tt - sre) - y
                    sre = tt
                    v = sin_t[a]
                    y = v - cim
                    tt = sim + y
                    cim = (tt - sim) - y
                    sim = tt
                m2 = sre * sre + sim * sim
                if m2 > best:
                    best = m2
                    best_t = t + 1
            M[c] = sqrt(best)
            arg[c] = best_t
    return M_np, arg_np

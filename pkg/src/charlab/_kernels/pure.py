"""Numpy fallback kernels.

Same contracts as the compiled backend ``charlab._kernels._core``:

    lpf_sieve(limit)            -> int32[limit+1], least prime factor (0 for 0,1)
    dlog_table(base, mod, ord)  -> int32[mod], table[base^i % mod] = i, else -1
    family_max_prefix(...)      -> per-character max |partial character sum|

The scan is vectorised over characters in chunks; the compiled backend
runs a Kahan-compensated scalar loop instead, which makes the two
backends numerically independent routes to the same values.
"""

import math

import numpy as np

# Cap on elements per scan chunk; keeps peak memory around ~100 MB.
_CHUNK_ELEMS = 1 << 21


def lpf_sieve(limit):
    limit = int(limit)
    lpf = np.zeros(limit + 1, dtype=np.int32)
    for p in range(2, math.isqrt(limit) + 1):
        if lpf[p] == 0:
            sl = lpf[p * p :: p]
            sl[sl == 0] = p
    # Everything still unmarked above 1 is prime.
    idx = np.flatnonzero(lpf[2:] == 0) + 2
    lpf[idx] = idx.astype(np.int32)
    return lpf


def dlog_table(base, modulus, order):
    """Index table of the cyclic group generated by ``base`` mod ``modulus``.

    ``order`` must be the exact multiplicative order, so the powers
    base^0 .. base^(order-1) are pairwise distinct and no slot is
    written twice.  Built baby-step/giant-step style to keep the Python
    loop at O(sqrt(order)).
    """
    base = int(base) % modulus
    table = np.full(modulus, -1, dtype=np.int32)
    if modulus == 1:
        return table
    s = math.isqrt(order) + 1
    baby = np.empty(s, dtype=np.int64)
    x = 1
    for i in range(s):
        baby[i] = x
        x = (x * base) % modulus
    giant = pow(base, s, modulus)
    g = 1
    for a in range(0, order, s):
        count = min(s, order - a)
        vals = (g * baby[:count]) % modulus
        table[vals] = np.arange(a, a + count, dtype=np.int32)
        g = (g * giant) % modulus
    return table


def family_max_mult(lpf, cof, coprime, plist, pang, R, cos_t, sin_t):
    """Multiplicative-extension scan (see _core for the contract).

    Composite angles are filled in doubling blocks [2^j, 2^(j+1)): the
    cofactor n / lpf(n) <= n/2 lies in an earlier block, so every read
    is final.  Summation is numpy cumsum, not compensated.
    """
    lpf = np.asarray(lpf, dtype=np.int64)
    cof = np.asarray(cof, dtype=np.int64)
    q = len(lpf) - 1
    nchars = pang.shape[1]
    M = np.empty(nchars, dtype=np.float64)
    arg = np.empty(nchars, dtype=np.int64)
    if nchars == 0:
        return M, arg
    blocks = []
    blk = 2
    while blk <= q:
        end = min(2 * blk, q + 1)
        seg = np.arange(blk, end)
        comp = seg[lpf[seg] != seg]
        if len(comp):
            blocks.append((comp, lpf[comp], cof[comp]))
        blk = end
    good = np.asarray(coprime, dtype=bool)[1:]
    chunk = max(1, _CHUNK_ELEMS // (q + 1))
    for lo in range(0, nchars, chunk):
        hi = min(nchars, lo + chunk)
        A = np.zeros((q + 1, hi - lo), dtype=np.int32)
        A[plist, :] = pang[:, lo:hi]
        for comp, p, m in blocks:
            A[comp, :] = (A[p, :] + A[m, :]) % R
        vals = cos_t.take(A[1:, :]) + 1j * sin_t.take(A[1:, :])
        vals[~good, :] = 0.0
        sums = np.cumsum(vals, axis=0)
        m2 = sums.real**2 + sums.imag**2
        idx = np.argmax(m2, axis=0)
        cols = np.arange(hi - lo)
        M[lo:hi] = np.sqrt(m2[idx, cols])
        arg[lo:hi] = idx + 1
    return M, arg


def family_max_prefix(dtab, ewmat, R, cos_t, sin_t):
    """Max absolute prefix sum for each character of one modulus.

    dtab  : int32[q, ngens], per-generator discrete logs of n = 1..q
            (-1 marks gcd(n, q) > 1; that n contributes 0).
    ewmat : int64[nchars, ngens], exponent * (R / generator_order).
    cos_t, sin_t : float64[R], the R-th roots of unity.

    Returns (M float64[nchars], argmax int64[nchars]); argmax is the
    smallest 1-based t attaining the maximum.
    """
    dtab = np.ascontiguousarray(dtab, dtype=np.int64)
    ewmat = np.ascontiguousarray(ewmat, dtype=np.int64)
    q = dtab.shape[0]
    nchars = ewmat.shape[0]
    M = np.empty(nchars, dtype=np.float64)
    arg = np.empty(nchars, dtype=np.int64)
    if nchars == 0:
        return M, arg
    zero_mask = (dtab < 0).any(axis=1)
    dsafe = np.where(dtab < 0, 0, dtab)
    chunk = max(1, _CHUNK_ELEMS // max(q, 1))
    for lo in range(0, nchars, chunk):
        hi = min(nchars, lo + chunk)
        ang = (ewmat[lo:hi] @ dsafe.T) % R
        vals = cos_t[ang] + 1j * sin_t[ang]
        vals[:, zero_mask] = 0.0
        sums = np.cumsum(vals, axis=1)
        m2 = sums.real**2 + sums.imag**2
        idx = np.argmax(m2, axis=1)
        rows = np.arange(hi - lo)
        M[lo:hi] = np.sqrt(m2[rows, idx])
        arg[lo:hi] = idx + 1
    return M, arg

#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallbacks.

Usage:
    python benchmarks/bench_kernels.py [--sieve-limit 1e7] [--q 2003]

Times the three hot kernels on both backends and reports speedups.
The compiled backend must be importable for a comparison; otherwise
only the fallback is timed.
"""

import argparse
import time

import numpy as np

from charlab._kernels import pure
from charlab.characters import build_group, enumerate_characters
from charlab.charsum import _ewmat
from charlab.primes import primitive_root, sieve_primes

try:
    from charlab._kernels import _core as core
except ImportError:
    core = None


def timeit(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sieve-limit", type=float, default=1e7)
    ap.add_argument("--q", type=int, default=2003,
                    help="modulus for the character-scan benchmarks")
    args = ap.parse_args()
    limit = int(args.sieve_limit)

    table = sieve_primes(max(args.q, 10**5))
    grp = build_group(args.q, table)
    chars = [c for c in enumerate_characters(grp) if not c.is_principal()]
    dtab = grp.scan_dtab()
    ewmat = _ewmat(grp, chars)
    cos_t, sin_t = grp.cos_sin_tables()

    # arguments for the multiplicative scan
    q = args.q
    lpf_q = np.ascontiguousarray(table.lpf[: q + 1], dtype=np.int32)
    ns = np.arange(q + 1, dtype=np.int64)
    coprime = (np.gcd(ns, q) == 1).astype(np.uint8)
    cof = (ns // np.maximum(lpf_q, 1)).astype(np.int32)
    prime_rows = np.flatnonzero(lpf_q == ns)[1:]
    dm = grp.dlog_matrix(prime_rows)
    pang = (np.where(dm < 0, 0, dm).astype(np.int64) @ ewmat.T) % grp.R

    dlog_mod = 9973
    dlog_gen = primitive_root(dlog_mod)

    cases = [
        ("lpf_sieve(%.0e)" % limit, (limit,), "lpf_sieve"),
        (f"dlog_table mod {dlog_mod}", (dlog_gen, dlog_mod, dlog_mod - 1),
         "dlog_table"),
        (f"family_max_prefix q={q} ({len(chars)} chars)",
         (dtab, ewmat, grp.R, cos_t, sin_t), "family_max_prefix"),
        (f"family_max_mult q={q} ({len(chars)} chars)",
         (lpf_q, cof, coprime, prime_rows, pang, grp.R, cos_t, sin_t),
         "family_max_mult"),
    ]

    width = max(len(name) for name, _, _ in cases)
    header = f"{'kernel':<{width}}  {'pure':>10}  {'cython':>10}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, call_args, attr in cases:
        t_pure, out_pure = timeit(getattr(pure, attr), *call_args)
        if core is not None:
            t_core, out_core = timeit(getattr(core, attr), *call_args)
            if attr.startswith("family"):
                assert np.max(np.abs(out_pure[0] - out_core[0])) < 1e-9
            else:
                assert np.array_equal(out_pure, out_core)
            print(f"{name:<{width}}  {t_pure:>9.3f}s  {t_core:>9.3f}s  "
                  f"{t_pure / t_core:>7.1f}x")
        else:
            print(f"{name:<{width}}  {t_pure:>9.3f}s  {'n/a':>10}  {'':>8}")


if __name__ == "__main__":
    main()

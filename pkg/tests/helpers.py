"""Independent oracles used by the tests.

Everything here is deliberately written without charlab internals:
segmented sieve, trial-division primes, Jacobi symbols, gcd-counting
totients.  Expected values frozen into tests were computed by these.
"""

import math


def segmented_prime_count(limit: int, segment: int = 1 << 16) -> int:
    """Prime count by a segmented sieve, independent of the lpf sieve."""
    if limit < 2:
        return 0
    root = math.isqrt(limit)
    base = [True] * (root + 1)
    base[0:2] = [False, False]
    for i in range(2, math.isqrt(root) + 1):
        if base[i]:
            base[i * i :: i] = [False] * len(base[i * i :: i])
    small = [i for i, f in enumerate(base) if f]
    count = len(small)
    lo = root + 1
    while lo <= limit:
        hi = min(lo + segment - 1, limit)
        seg = [True] * (hi - lo + 1)
        for p in small:
            start = max(p * p, (lo + p - 1) // p * p)
            for j in range(start, hi + 1, p):
                seg[j - lo] = False
        count += sum(seg)
        lo = hi + 1
    return count


def naive_primes(n: int) -> list[int]:
    out = []
    for m in range(2, n + 1):
        if all(m % p for p in out if p * p <= m):
            out.append(m)
    return out


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n > 0."""
    assert n > 0 and n % 2 == 1
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def brute_phi(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


def exact_prefix_max(chi) -> tuple[float, int]:
    """M(chi) through the exact root-of-unity path, complex summation."""
    s = 0j
    best, best_t = -1.0, 0
    for n in range(1, chi.q + 1):
        s += chi.value(n).to_complex()
        a = abs(s)
        if a > best:
            best, best_t = a, n
    return best, best_t

"""Prime sieving, factorization, primitive roots and discrete logs.

The arithmetic substrate for everything else: a least-prime-factor
sieve (so any n up to the sieve limit factors in O(log n)), exact
factorization with a deterministic 64-bit primality test for
cofactors, and per-modulus discrete-log lookup tables for unit groups
of prime powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from . import _kernels
from .errors import (
    DomainError,
    IncompleteFactorizationError,
    ResourceLimitError,
)

# Hard ceiling for sieve requests; the lpf array is 4 bytes per integer.
DEFAULT_SIEVE_CEILING = 10**9
# Discrete-log tables are full lookup arrays, capped per modulus.
DLOG_MODULUS_CAP = 10**7

# Witnesses making Miller-Rabin deterministic for all n < 3.3 * 10^24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


@dataclass(frozen=True)
class Factorization:
    """Prime factorization as ordered (prime, exponent) pairs."""

    pairs: tuple[tuple[int, int], ...]

    @property
    def value(self) -> int:
        return reduce(lambda acc, pe: acc * pe[0] ** pe[1], self.pairs, 1)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.pairs)

    def phi(self) -> int:
        out = 1
        for p, e in self.pairs:
            out *= (p - 1) * p ** (e - 1)
        return out

    def omega(self) -> int:
        return len(self.pairs)

    def least_prime(self) -> float:
        """Least prime factor; +inf for the empty product."""
        return self.pairs[0][0] if self.pairs else math.inf


class PrimeTable:
    """Primes up to ``limit`` plus a least-prime-factor array.

    Immutable after construction; safe to share across workers.
    """

    def __init__(self, limit: int, lpf: np.ndarray, primes: np.ndarray):
        self.limit = limit
        self.lpf = lpf
        self.primes = primes

    def __repr__(self):  # pragma: no cover
        return f"PrimeTable(limit={self.limit}, count={len(self.primes)})"

    def primes_up_to(self, y: float) -> np.ndarray:
        """Primes p <= y as an int64 view (inclusive cutoff)."""
        if y > self.limit:
            raise ResourceLimitError(
                f"cutoff {y} exceeds sieve limit {self.limit}"
            )
        hi = int(np.searchsorted(self.primes, math.floor(y), side="right"))
        return self.primes[:hi]

    def is_prime(self, n: int) -> bool:
        if n <= self.limit:
            return n >= 2 and int(self.lpf[n]) == n
        return is_prime_64(n)

    def smallest_factor(self, n: int) -> int:
        if not 2 <= n <= self.limit:
            raise DomainError(f"smallest_factor needs 2 <= n <= {self.limit}")
        return int(self.lpf[n])

    def factorize(self, n: int) -> Factorization:
        return factorize(n, self)

    def phi(self, n: int) -> int:
        return self.factorize(n).phi()


def sieve_primes(limit: int, ceiling: int = DEFAULT_SIEVE_CEILING) -> PrimeTable:
    """Sieve primes and least prime factors up to ``limit`` inclusive."""
    if limit < 2:
        raise DomainError(f"sieve limit {limit} < 2 would give an empty table")
    if limit > ceiling:
        raise ResourceLimitError(f"sieve limit {limit} exceeds ceiling {ceiling}")
    lpf = _kernels.lpf_sieve(limit)
    idx = np.arange(limit + 1, dtype=np.int32)
    primes = np.flatnonzero(lpf == idx)[1:].astype(np.int64)  # drop n=0
    return PrimeTable(limit, lpf, primes)


def is_prime_64(n: int) -> bool:
    """Deterministic Miller-Rabin for n within the 64-bit range."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int, table: PrimeTable) -> Factorization:
    """Factor n >= 1 using the lpf table, then trial division plus a
    primality check for any cofactor above the sieve limit."""
    if n < 1:
        raise DomainError(f"cannot factorize {n} < 1")
    pairs: list[tuple[int, int]] = []
    m = n
    while 2 <= m <= table.limit:
        p = int(table.lpf[m])
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        pairs.append((p, e))
    if m > 1:
        # Cofactor above the sieve range: strip sieved primes, then the
        # remainder must itself be prime to resolve.
        for p in table.primes:
            p = int(p)
            if p * p > m:
                break
            if m % p == 0:
                e = 0
                while m % p == 0:
                    m //= p
                    e += 1
                pairs.append((p, e))
        if m > 1:
            if m <= table.limit * table.limit or is_prime_64(m):
                if not is_prime_64(m):
                    raise IncompleteFactorizationError(
                        f"composite cofactor {m} for n={n}"
                    )
                pairs.append((m, 1))
            else:
                raise IncompleteFactorizationError(
                    f"cofactor {m} of n={n} not resolvable with limit {table.limit}"
                )
    pairs.sort()
    return Factorization(tuple(pairs))


def _prime_power_split(pp: int) -> tuple[int, int]:
    """Return (p, e) with pp = p^e, or raise DomainError."""
    if pp < 2:
        raise DomainError(f"{pp} is not a prime power >= 2")
    for p in (2, 3, 5, 7, 11, 13):
        if pp % p == 0:
            m, e = pp, 0
            while m % p == 0:
                m //= p
                e += 1
            if m != 1:
                raise DomainError(f"{pp} is not a prime power")
            return p, e
    # No small factor: check pp = p^e by integer roots.
    for e in range(1, pp.bit_length()):
        r = round(pp ** (1.0 / e))
        for cand in (r - 1, r, r + 1):
            if cand >= 2 and cand**e == pp and is_prime_64(cand):
                return cand, e
    raise DomainError(f"{pp} is not a prime power")


def _factor_distinct(n: int) -> list[int]:
    """Distinct prime factors by trial division (small n only)."""
    out = []
    m = n
    d = 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1 if d == 2 else 2
    if m > 1:
        out.append(m)
    return out


def primitive_root(prime_power: int) -> int:
    """Smallest generator of the unit group mod p^e (cyclic cases).

    Accepts odd prime powers and 2, 4.  For 2^e with e >= 3 the unit
    group is not cyclic; use unit_group_generators for the <-1, 5>
    decomposition.
    """
    if prime_power in (1, 2):
        return 1
    if prime_power == 4:
        return 3
    p, e = _prime_power_split(prime_power)
    if p == 2:
        raise DomainError(
            f"unit group mod {prime_power} is not cyclic; "
            "use unit_group_generators"
        )
    phi = (p - 1) * p ** (e - 1)
    checks = [phi // r for r in _factor_distinct(phi)]
    g = 2
    while True:
        if g % p != 0 and all(pow(g, c, prime_power) != 1 for c in checks):
            return g
        g += 1


def unit_group_generators(prime_power: int) -> tuple[tuple[int, int], ...]:
    """Generators with orders for the unit group mod a prime power.

    Odd p^e and 4 give a single generator; 2^e (e >= 3) gives the pair
    (-1 mod 2^e, order 2) and (5, order 2^(e-2)); 1 and 2 give ().
    """
    if prime_power in (1, 2):
        return ()
    p, e = _prime_power_split(prime_power)
    if p == 2 and e >= 3:
        return ((prime_power - 1, 2), (5, 2 ** (e - 2)))
    g = primitive_root(prime_power)
    phi = (p - 1) * p ** (e - 1)
    return ((g, phi),)


class DlogTable:
    """O(1) discrete logs to a fixed base via a full lookup array."""

    def __init__(self, modulus: int, base: int, order: int):
        if modulus > DLOG_MODULUS_CAP:
            raise ResourceLimitError(
                f"dlog table for modulus {modulus} exceeds cap {DLOG_MODULUS_CAP}"
            )
        self.modulus = modulus
        self.base = base
        self.order = order
        self.table = _kernels.dlog_table(base, modulus, order)

    def __call__(self, a: int) -> int:
        d = int(self.table[a % self.modulus])
        if d < 0:
            raise DomainError(
                f"{a} is not a power of {self.base} mod {self.modulus}"
            )
        return d


def discrete_log(prime_power: int, generator: int, a: int) -> int:
    """Exponent i with generator^i = a mod prime_power (table-based)."""
    if math.gcd(a, prime_power) != 1:
        raise DomainError(f"gcd({a}, {prime_power}) > 1")
    p, e = _prime_power_split(prime_power)
    phi = (p - 1) * p ** (e - 1)
    order = phi
    # The supplied generator may generate a proper subgroup (e.g. 5 mod 2^e).
    x, order = 1, 0
    while True:
        x = x * generator % prime_power
        order += 1
        if x == 1:
            break
        if order > phi:
            raise DomainError(f"{generator} is not a unit mod {prime_power}")
    return DlogTable(prime_power, generator, order)(a)

"""Maximal character partial sums M(chi) and bulk family scans.

M(chi) = max_{t >= 1} |sum_{n <= t} chi(n)|.  For non-principal chi
the sum over a full period vanishes, so the maximum over one period
t = 1..q is the global one.  Two independent computation routes are
kept deliberately separate:

* the kernel scan (compiled Kahan loop or vectorised cumsum), which
  evaluates chi(n) through discrete-log angle tables; and
* a multiplicative oracle that only evaluates chi at primes and
  extends by complete multiplicativity chi(p m) = chi(p) chi(m),
  summing with numpy's cumsum.

Their agreement is an acceptance criterion, not an assumption.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .characters import CharacterGroup, DirichletCharacter, build_group, enumerate_characters
from .errors import DomainError
from .pretentious import delta_g
from .primes import PrimeTable, sieve_primes

_CHUNK_ELEMS = 1 << 22


@dataclass
class SumProfile:
    """M(chi) together with the location of the maximum."""

    q: int
    char: str
    M: float
    argmax_t: int
    normalized: float  # M / sqrt(q)
    partial: np.ndarray | None = None  # prefix sums, if retained


@dataclass(frozen=True)
class ScanRecord:
    """One row of a family scan; recomputable from (q, char)."""

    q: int
    char: str
    order: int
    parity: str
    conductor: int
    M: float
    m_over_sqrtq: float
    envelope_ratio: float


@dataclass
class PVReport:
    """Pólya-Vinogradov check M <= sqrt(q) log q with constant 1."""

    checked: int
    violations: list


def _ewmat(group: CharacterGroup, chars: list[DirichletCharacter]) -> np.ndarray:
    out = np.empty((len(chars), group.ngens), dtype=np.int64)
    for i, chi in enumerate(chars):
        out[i] = [e * w for e, w in zip(chi.exponents, group.weights)]
    return out


def family_max(group: CharacterGroup,
               chars: list[DirichletCharacter]) -> tuple[np.ndarray, np.ndarray]:
    """(M, argmax_t) for each character, via the selected kernel."""
    if not chars:
        return np.empty(0), np.empty(0, dtype=np.int64)
    cos_t, sin_t = group.cos_sin_tables()
    return _kernels.family_max_prefix(
        group.scan_dtab(), _ewmat(group, chars), group.R, cos_t, sin_t
    )


def family_max_multiplicative(
    group: CharacterGroup, chars: list[DirichletCharacter], lpf: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Independent recomputation: prime values extended multiplicatively.

    ``lpf`` must cover the modulus.  Composite angles are filled in
    doubling blocks [2^j, 2^(j+1)) so that the cofactor n / lpf(n),
    which is at most n/2, is always already final.
    """
    q, R = group.q, group.R
    if not chars:
        return np.empty(0), np.empty(0, dtype=np.int64)
    cos_t, sin_t = group.cos_sin_tables()
    lpf_q = np.ascontiguousarray(lpf[: q + 1], dtype=np.int32)
    ns = np.arange(q + 1, dtype=np.int64)
    coprime = (np.gcd(ns, q) == 1).astype(np.uint8)
    cof = ns // np.maximum(lpf_q, 1)  # cofactor n / lpf(n)
    prime_rows = np.flatnonzero(lpf_q == ns)[1:]  # primes <= q
    dm = group.dlog_matrix(prime_rows)
    dm_safe = np.where(dm < 0, 0, dm).astype(np.int64)
    pang = (dm_safe @ _ewmat(group, chars).T) % R
    return _kernels.family_max_mult(
        lpf_q, cof.astype(np.int32), coprime, prime_rows, pang, R,
        cos_t, sin_t,
    )


def max_partial_sum(chi: DirichletCharacter, retain: bool = False) -> SumProfile:
    """Exact-to-rounding M(chi); ties in t broken by the smallest t."""
    if chi.is_principal():
        raise DomainError("principal character: partial sums are unbounded")
    if chi.q < 3:
        raise DomainError(f"modulus {chi.q} < 3 has no non-principal characters")
    group = chi.group
    M, arg = family_max(group, [chi])
    partial = None
    if retain:
        vals = chi.value_array(np.arange(1, chi.q + 1))
        partial = np.cumsum(vals)
    return SumProfile(chi.q, chi.label(), float(M[0]), int(arg[0]),
                      float(M[0]) / math.sqrt(chi.q), partial)


def envelope_ratio(M: float, q: int, g: int) -> float:
    """M / (sqrt(q) (loglog q)^(1 - delta_g)); the empirical envelope."""
    ll = math.log(math.log(q))
    return M / (math.sqrt(q) * ll ** (1.0 - delta_g(g)))


def _scan_chunk(table: PrimeTable, qs, g: int,
                primitive_only: bool) -> list[ScanRecord]:
    records = []
    for q in qs:
        group = build_group(q, table)
        chars = [
            chi
            for chi in enumerate_characters(
                group, order_divides=g, primitive_only=primitive_only
            )
            if chi.order == g
        ]
        if not chars:
            continue
        M, _ = family_max(group, chars)
        for chi, m in zip(chars, M):
            records.append(
                ScanRecord(
                    q, chi.label(), chi.order, chi.parity(), chi.conductor,
                    float(m), float(m) / math.sqrt(q),
                    envelope_ratio(float(m), q, g),
                )
            )
    return records


def _scan_worker(args):  # multiprocessing entry point
    qs, g, primitive_only = args
    table = sieve_primes(max(qs))
    return _scan_chunk(table, qs, g, primitive_only)


class ScanStream:
    """Ordered record stream with a resource cap and truncation marker.

    Tracks the running maximum of M / sqrt(q) as records pass through;
    ``truncated`` turns True only if the cap cut off actual output.
    """

    def __init__(self, it, max_records: int | None):
        self._it = it
        self._max = max_records
        self._count = 0
        self.running_max = 0.0
        self.truncated = False

    def __iter__(self):
        return self

    def __next__(self) -> ScanRecord:
        if self._max is not None and self._count >= self._max:
            try:
                next(self._it)
            except StopIteration:
                raise
            self.truncated = True
            raise StopIteration
        rec = next(self._it)
        self._count += 1
        self.running_max = max(self.running_max, rec.m_over_sqrtq)
        return rec


def scan_family(
    table: PrimeTable,
    q_lo: int,
    q_hi: int,
    g: int,
    primitive_only: bool = False,
    max_records: int | None = None,
    threads: int = 1,
) -> ScanStream:
    """Stream one ScanRecord per character of order exactly g, q ascending.

    With ``threads`` > 1 contiguous q-chunks go to worker processes and
    results are merged in submission order, so output is deterministic
    either way.
    """
    if g < 3 or g % 2 == 0:
        raise DomainError(f"family order g must be odd >= 3, got {g}")
    qs = list(range(max(3, q_lo), q_hi + 1))

    if threads > 1 and len(qs) > 1:

        def source():
            import multiprocessing as mp

            size = max(1, math.ceil(len(qs) / (threads * 4)))
            chunks = [qs[i : i + size] for i in range(0, len(qs), size)]
            with mp.Pool(threads) as pool:
                for part in pool.imap(
                    _scan_worker, [(c, g, primitive_only) for c in chunks]
                ):
                    yield from part

    else:

        def source():
            for q in qs:
                yield from _scan_chunk(table, [q], g, primitive_only)

    return ScanStream(source(), max_records)


def polya_vinogradov_check(records) -> PVReport:
    """Assert M <= sqrt(q) log q per record; violations reported, not fatal."""
    violations = []
    checked = 0
    for rec in records:
        checked += 1
        if rec.M > math.sqrt(rec.q) * math.log(rec.q):
            violations.append(rec)
    return PVReport(checked, violations)

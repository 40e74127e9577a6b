"""Truncated Euler products and prime-reciprocal constants in APs.

For a character xi mod m define the completely multiplicative k_xi by

    k_xi(p) = p (1 - (1 - xi(p)/p) (1 - 1/p)^(-xi(p))),

with (1-1/p)^(-xi(p)) = exp(-xi(p) log(1-1/p)) through the real log.
Then K(s, xi) = sum k_xi(n) n^{-s} converges absolutely for Re s > 0
and, termwise at every prime not dividing m,

    -log(1 - k_xi(p)/p) + log(1 - xi(p)/p) = xi(p) log(1 - 1/p),

an exact identity in principal branches (the arguments never straddle
the cut).  The AP constant is

    C_m(a) = (1/phi(m)) sum_{xi != xi0} conj(xi)(a) log(K(1,xi)/L(1,xi))
             - (gamma + log(phi(m)/m)) / phi(m),

which enters  sum_{p <= y, p = a mod m} -log(1 - 1/p)
              = loglog(y)/phi(m) - C_m(a) + (decaying error).

Note the log-form left side: with sum 1/p instead, the residual tends
to the constant -sum_{p = a mod m} (log(1/(1-1/p)) - 1/p) != 0, which
is why lz_residual reports the log-form residual as primary and the
raw 1/p-form alongside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .characters import DirichletCharacter, build_group, enumerate_characters
from .errors import DomainError
from .pretentious import OddOrderParams, sj_table
from .primes import PrimeTable

# Euler-Mascheroni constant, 30 significant digits; cross-checked in
# tests against a harmonic-sum-minus-log oracle.
EULER_GAMMA = 0.577215664901532860606512090082

# Mertens constant: gamma + sum_p (log(1-1/p) + 1/p).
MERTENS = 0.261497212847642783755426838609


@dataclass
class EulerProductValue:
    """A truncated log K(1,.) or log L(1,.) with an error indicator."""

    char: str
    X: float
    log_value: complex
    error_estimate: float


@dataclass
class CmaValue:
    """C_m(a) split into its character-sum and constant pieces."""

    m: int
    a: int
    value: float
    xi_sum_term: float
    const_term: float


def kxi_values(values: np.ndarray, primes: np.ndarray) -> np.ndarray:
    """Vectorised k_xi(p) from character values at the primes."""
    p = primes.astype(np.float64)
    lg = np.log1p(-1.0 / p)  # log(1 - 1/p), real
    return p * (1.0 - (1.0 - values / p) * np.exp(-values * lg))


def k_xi_at_prime(xi: DirichletCharacter, p: int) -> complex:
    """k_xi at a single prime (p | m gives exactly 0)."""
    v = xi.value(p).to_complex()
    return complex(kxi_values(np.array([v]), np.array([p]))[0])


def log_K(xi: DirichletCharacter, X: float, table: PrimeTable) -> EulerProductValue:
    """-sum_{p <= X} log(1 - k_xi(p)/p); absolutely convergent tail O(1/X)."""
    if X < 3:
        raise DomainError(f"truncation X must be >= 3, got {X}")
    primes = table.primes_up_to(X)
    vals = xi.prime_values(primes)
    ratio = kxi_values(vals, primes) / primes
    if np.max(np.abs(ratio)) >= 1.0:
        raise DomainError("euler factor |k_xi(p)/p| >= 1; cannot take log")
    lv = -np.sum(np.log(1.0 - ratio))
    return EulerProductValue(xi.label(), X, complex(lv), 10.0 / X)


def log_L(xi: DirichletCharacter, X: float, table: PrimeTable) -> EulerProductValue:
    """-sum_{p <= X} log(1 - xi(p)/p) for non-principal xi.

    The error estimate is monitored (X vs X/2 difference), not assumed.
    """
    if xi.is_principal():
        raise DomainError("log L diverges for the principal character")
    if X < 3:
        raise DomainError(f"truncation X must be >= 3, got {X}")
    primes = table.primes_up_to(X)
    vals = xi.prime_values(primes)
    terms = np.log(1.0 - vals / primes)
    lv = -np.sum(terms)
    half = len(table.primes_up_to(X / 2))
    est = abs(-np.sum(terms[:half]) - lv)
    return EulerProductValue(xi.label(), X, complex(lv), float(est))


def log_kl_diff(xi: DirichletCharacter, X: float, table: PrimeTable) -> complex:
    """log(K(1,xi)/L(1,xi)) truncated at X."""
    return log_K(xi, X, table).log_value - log_L(xi, X, table).log_value


class CmaComputer:
    """Shared state for C_m(a) over all residues a of one modulus.

    Computes log(K/L) once per non-principal character and reuses it
    for every residue, coset sum, and power of a fixed character.
    """

    def __init__(self, m: int, X: float, table: PrimeTable):
        if m < 3:
            raise DomainError(f"modulus m must be >= 3, got {m}")
        self.m = m
        self.X = X
        self.table = table
        self.group = build_group(m, table)
        self.characters = [
            chi for chi in enumerate_characters(self.group)
            if not chi.is_principal()
        ]
        self.diffs = {
            chi.label(): log_kl_diff(chi, X, table) for chi in self.characters
        }
        self.const = (EULER_GAMMA + math.log(self.group.phi / m)) / self.group.phi
        self._values: dict[int, CmaValue] = {}

    def diff_of(self, chi: DirichletCharacter) -> complex:
        lbl = chi.label()
        if lbl not in self.diffs:
            self.diffs[lbl] = log_kl_diff(chi, self.X, self.table)
        return self.diffs[lbl]

    def c_m_a(self, a: int) -> CmaValue:
        a %= self.m
        if math.gcd(a, self.m) != 1:
            raise DomainError(f"gcd({a}, {self.m}) > 1")
        if a in self._values:
            return self._values[a]
        s = 0j
        for chi in self.characters:
            s += chi.value(a).conj().to_complex() * self.diffs[chi.label()]
        s /= self.group.phi
        if abs(s.imag) > 1e-8:
            raise DomainError(
                f"C_{self.m}({a}) has imaginary part {s.imag}: conjugate "
                "pairing violated"
            )
        out = CmaValue(self.m, a, s.real - self.const, s.real, -self.const)
        self._values[a] = out
        return out

    def row(self) -> list[CmaValue]:
        return [
            self.c_m_a(a) for a in range(1, self.m + 1)
            if math.gcd(a, self.m) == 1
        ]

    def row_sum_identity(self) -> tuple[float, float]:
        """(sum_a C_m(a), -(gamma + log(phi/m))); orthogonality makes
        the character terms cancel."""
        lhs = sum(v.value for v in self.row())
        rhs = -(EULER_GAMMA + math.log(self.group.phi / self.m))
        return lhs, rhs


def c_m_a(m: int, a: int, X: float, table: PrimeTable) -> CmaValue:
    return CmaComputer(m, X, table).c_m_a(a)


@dataclass
class LzResidual:
    """Finite prime sums in the class a mod m against the AP constant.

    residual      log-form: sum -log(1-1/p) - (loglog y / phi - C_m(a));
                  tends to 0 as y grows.
    residual_raw  1/p-form per the literal main term; tends to the
                  nonzero prime-square tail constant of the class.
    """

    m: int
    a: int
    y: float
    X: float
    sum_recip: float
    sum_log_form: float
    cma: float
    residual: float
    residual_raw: float


def lz_residual(m: int, a: int, y: float, X: float, table: PrimeTable,
                computer: CmaComputer | None = None) -> LzResidual:
    if math.gcd(a, m) != 1:
        raise DomainError(f"gcd({a}, {m}) > 1")
    if y < 100:
        raise DomainError(f"y must be >= 100, got {y}")
    comp = computer if computer is not None else CmaComputer(m, X, table)
    primes = table.primes_up_to(y)
    cls = primes[primes % m == a % m]
    pf = cls.astype(np.float64)
    sum_recip = float(np.sum(1.0 / pf))
    sum_log = float(-np.sum(np.log1p(-1.0 / pf)))
    cma = comp.c_m_a(a).value
    expected = math.log(math.log(y)) / comp.group.phi - cma
    return LzResidual(
        m, a, y, comp.X, sum_recip, sum_log, cma,
        sum_log - expected, sum_recip - expected,
    )


def mertens_residual(y: float, table: PrimeTable) -> float:
    """sum_{p <= y} 1/p - loglog y; tends to the Mertens constant."""
    primes = table.primes_up_to(y).astype(np.float64)
    return float(np.sum(1.0 / primes)) - math.log(math.log(y))


@dataclass
class CosetCheck:
    m: int
    psi: str
    ell: int
    lhs: float
    rhs: float
    abs_err: float
    coset_size: int
    expected_size: int


def coset_identity_check(psi: DirichletCharacter, ell: int, X: float,
                         table: PrimeTable,
                         computer: CmaComputer | None = None) -> CosetCheck:
    """Sum of C_m(a) over the coset {a : psi(a) = e(ell/k)} against the
    power-sum form (1/k) sum_{j != 0} e(-ell j/k) log(K/L)(psi^j)
    - (gamma + log(phi/m))/k, plus the exact cardinality phi(m)/k."""
    m = psi.q
    k = psi.order
    if not psi.is_primitive():
        raise DomainError("coset identity requires a primitive character")
    if not 0 <= ell < k:
        raise DomainError(f"need 0 <= ell < k, got {ell}")
    comp = computer if computer is not None else CmaComputer(m, X, table)
    # Exact coset membership through reduced angles: psi(a) = e(ell/k).
    d = math.gcd(ell, k) if ell else k
    target_red = (ell // d, k // d) if ell else (0, 1)
    coset = [
        a for a in range(1, m + 1)
        if math.gcd(a, m) == 1 and psi.value(a).reduced() == target_red
    ]
    lhs = sum(comp.c_m_a(a).value for a in coset)
    s = 0j
    for j in range(1, k):
        s += (
            np.exp(-2j * np.pi * ell * j / k)
            * comp.diff_of(psi**j)
        )
    rhs = (s / k).real - (EULER_GAMMA + math.log(comp.group.phi / m)) / k
    return CosetCheck(
        m, psi.label(), ell, float(lhs), float(rhs), abs(lhs - rhs),
        len(coset), comp.group.phi // k,
    )


@dataclass
class ControlErrCheck:
    m: int
    psi: str
    g: int
    k_star: int
    P: float
    lhs: float
    rhs: float
    abs_err: float


def control_err_check(psi: DirichletCharacter, g: int, X: float, P: float,
                      table: PrimeTable,
                      computer: CmaComputer | None = None) -> ControlErrCheck:
    """S_j-weighted log(K/L) sums against the cos-weighted small-prime
    classification below P (bounded-residual check).

    lhs = sum_{j != 0 mod k*} S_j log(K/L)(psi~^j),  psi~ = psi^gcd(g,k);
    rhs = -sum_l cos((2 pi/g)||g* l/k*||) (sum_{p <= P, psi~(p)=e(l/k*)} 1/p
          - (1/k*) sum_{p <= P, p not | m} 1/p).
    """
    m = psi.q
    params = OddOrderParams.reduce(g, psi.order)
    k_star = params.k_star
    psit = psi ** math.gcd(g, psi.order)
    comp = computer if computer is not None else CmaComputer(m, X, table)
    if k_star == 1:
        return ControlErrCheck(m, psi.label(), g, 1, P, 0.0, 0.0, 0.0)
    sj = sj_table(g, k_star, params.g_star).values_dft
    lhs = 0j
    for j in range(1, k_star):
        lhs += sj[j] * comp.diff_of(psit**j)
    primes = table.primes_up_to(P)
    ell = psit.ell_values(primes)
    cos_t = cos_theta_table_reduced(g, params.g_star, k_star)
    class_sums = np.zeros(k_star)
    total = 0.0
    for p, l in zip(primes, ell):
        if l >= 0:
            class_sums[l] += 1.0 / p
            total += 1.0 / p
    rhs = -float(np.sum(cos_t * (class_sums - total / k_star)))
    return ControlErrCheck(
        m, psi.label(), g, k_star, P, float(lhs.real), rhs,
        abs(float(lhs.real) - rhs),
    )


def cos_theta_table_reduced(g: int, g_star: int, k_star: int) -> np.ndarray:
    """cos((2 pi/g) ||g* l/k*||) for l mod k*."""
    ell = np.arange(k_star, dtype=np.int64)
    r = (ell * g_star) % k_star
    dist = np.minimum(r, k_star - r) / k_star
    return np.cos(2.0 * np.pi * dist / g)


@dataclass
class MertensRestricted:
    m: int
    P: float
    lhs: float
    rhs: float
    abs_err: float
    subtracted: float  # exact sum of 1/p over p | m, p <= P


def mertens_restricted(m: int, P: float, table: PrimeTable) -> MertensRestricted:
    """sum_{p <= P, p not | m} 1/p against loglog P + Mertens - sum_{p | m} 1/p."""
    if P < 3:
        raise DomainError(f"P must be >= 3, got {P}")
    primes = table.primes_up_to(P)
    mask = m % primes != 0 if m > 1 else np.ones(len(primes), dtype=bool)
    lhs = float(np.sum(1.0 / primes[mask]))
    subtracted = float(np.sum(1.0 / primes[~mask]))
    rhs = math.log(math.log(P)) + MERTENS - subtracted
    return MertensRestricted(m, P, lhs, rhs, abs(lhs - rhs), subtracted)

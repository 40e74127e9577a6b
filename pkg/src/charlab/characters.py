"""Dirichlet characters modulo q with exact root-of-unity values.

The unit group mod q is CRT-decomposed into cyclic pieces with fixed
generators (smallest primitive root per odd prime power; the pair
<-1, 5> for 2^e, e >= 3).  A character is an exponent vector over
those generators, and its values are exact rational angles a/R with
R = lcm of the generator orders.  Conversion to floating complex is
deferred to summation time, so identity checks (orthogonality, value
agreement under induction) can be made exact.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import reduce

import numpy as np

from .errors import DomainError
from .primes import PrimeTable, factorize, unit_group_generators


class UnitValue:
    """A root of unity e(num/den), or exact zero.

    e(t) means exp(2*pi*i*t).  Products and conjugates stay exact;
    to_complex() is the only lossy operation.
    """

    __slots__ = ("num", "den", "zero")

    def __init__(self, num: int, den: int, zero: bool = False):
        if zero:
            self.num, self.den, self.zero = 0, 1, True
        else:
            self.num, self.den, self.zero = num % den, den, False

    ZERO: "UnitValue"
    ONE: "UnitValue"

    def reduced(self) -> tuple[int, int]:
        """Angle in lowest terms; (0, 0) encodes the zero value."""
        if self.zero:
            return (0, 0)
        g = math.gcd(self.num, self.den)
        return (self.num // g, self.den // g)

    @property
    def angle(self) -> Fraction:
        if self.zero:
            raise DomainError("zero value has no angle")
        return Fraction(self.num, self.den)

    def __mul__(self, other: "UnitValue") -> "UnitValue":
        if self.zero or other.zero:
            return UnitValue.ZERO
        den = self.den * other.den // math.gcd(self.den, other.den)
        num = self.num * (den // self.den) + other.num * (den // other.den)
        return UnitValue(num, den)

    def conj(self) -> "UnitValue":
        if self.zero:
            return UnitValue.ZERO
        return UnitValue(-self.num, self.den)

    def __pow__(self, k: int) -> "UnitValue":
        if self.zero:
            return UnitValue.ZERO
        return UnitValue(self.num * k, self.den)

    def __eq__(self, other):
        if not isinstance(other, UnitValue):
            return NotImplemented
        return self.reduced() == other.reduced()

    def __hash__(self):
        return hash(self.reduced())

    def to_complex(self) -> complex:
        if self.zero:
            return 0j
        t = 2.0 * math.pi * self.num / self.den
        return complex(math.cos(t), math.sin(t))

    def __repr__(self):  # pragma: no cover
        if self.zero:
            return "UnitValue(0)"
        n, d = self.reduced()
        return f"UnitValue(e({n}/{d}))"


UnitValue.ZERO = UnitValue(0, 1, zero=True)
UnitValue.ONE = UnitValue(0, 1)


def _two_adic_tables(modulus: int) -> tuple[np.ndarray, np.ndarray]:
    """Sign/5-power index tables for odd residues mod 2^e, e >= 3."""
    ord5 = modulus // 4
    sign = np.full(modulus, -1, dtype=np.int32)
    five = np.full(modulus, -1, dtype=np.int32)
    x = 1
    for b in range(ord5):
        sign[x] = 0
        five[x] = b
        sign[modulus - x] = 1
        five[modulus - x] = b
        x = x * 5 % modulus
    return sign, five


class _Component:
    """One prime-power block of the CRT decomposition."""

    __slots__ = ("prime", "exp", "modulus", "gens", "orders", "dlogs", "parity")

    def __init__(self, prime: int, exp: int):
        from . import _kernels
        from .errors import ResourceLimitError
        from .primes import DLOG_MODULUS_CAP

        self.prime = prime
        self.exp = exp
        self.modulus = prime**exp
        if self.modulus > DLOG_MODULUS_CAP:
            raise ResourceLimitError(
                f"discrete-log table for modulus {self.modulus} exceeds "
                f"the per-component cap {DLOG_MODULUS_CAP}"
            )
        pairs = unit_group_generators(self.modulus)
        self.gens = tuple(g for g, _ in pairs)
        self.orders = tuple(o for _, o in pairs)
        if prime == 2 and exp >= 3:
            # Joint decomposition n = (-1)^a 5^b; a single-generator
            # table per axis cannot represent it.
            self.dlogs = _two_adic_tables(self.modulus)
            self.parity = (True, False)
        else:
            self.dlogs = tuple(
                _kernels.dlog_table(g, self.modulus, o) for g, o in pairs
            )
            self.parity = tuple(True for _ in self.gens)


class CharacterGroup:
    """Character group (dual of the unit group) modulo q."""

    def __init__(self, q: int, table: PrimeTable):
        if q < 1:
            raise DomainError(f"modulus {q} < 1")
        self.q = q
        fac = factorize(q, table)
        self.components = tuple(_Component(p, e) for p, e in fac.pairs)
        self.gen_orders = tuple(
            o for c in self.components for o in c.orders
        )
        self.ngens = len(self.gen_orders)
        self.phi = reduce(lambda a, b: a * b, self.gen_orders, 1)
        self.R = reduce(math.lcm, self.gen_orders, 1)
        self.weights = tuple(self.R // o for o in self.gen_orders)
        # Flattened per-generator data for vectorised evaluation.
        self.comp_mods = tuple(
            c.modulus for c in self.components for _ in c.gens
        )
        self.gen_dlogs = tuple(d for c in self.components for d in c.dlogs)
        self.parity_flags = tuple(
            f for c in self.components for f in c.parity
        )
        self._cos_sin: tuple[np.ndarray, np.ndarray] | None = None
        self._dtab: np.ndarray | None = None

    def __repr__(self):  # pragma: no cover
        return f"CharacterGroup(q={self.q}, phi={self.phi})"

    def principal(self) -> "DirichletCharacter":
        return DirichletCharacter(self, (0,) * self.ngens)

    def character(self, exponents) -> "DirichletCharacter":
        return DirichletCharacter(self, tuple(int(e) for e in exponents))

    def dlog_vector(self, n: int) -> tuple[int, ...] | None:
        """Per-generator discrete logs of n, or None if gcd(n, q) > 1."""
        out = []
        for mod, tab in zip(self.comp_mods, self.gen_dlogs):
            d = int(tab[n % mod])
            if d < 0:
                return None
            out.append(d)
        if self.components and any(
            math.gcd(n, c.modulus) > 1 for c in self.components if not c.gens
        ):
            return None
        return tuple(out)

    def reconstruct(self, dlogs) -> int:
        """CRT-combine generator powers back into a residue mod q."""
        residue, modulus = 0, 1
        i = 0
        for comp in self.components:
            r = 1
            for g in comp.gens:
                r = r * pow(g, int(dlogs[i]), comp.modulus) % comp.modulus
                i += 1
            if modulus == 1:
                residue = r % comp.modulus
            else:
                inv = pow(modulus % comp.modulus, -1, comp.modulus)
                residue += modulus * (((r - residue) * inv) % comp.modulus)
            modulus *= comp.modulus
        return residue % self.q if self.q > 1 else 0

    def coprime_mask(self, ns: np.ndarray) -> np.ndarray:
        return np.gcd(ns.astype(np.int64), self.q) == 1

    def cos_sin_tables(self) -> tuple[np.ndarray, np.ndarray]:
        if self._cos_sin is None:
            ang = 2.0 * np.pi * np.arange(self.R) / self.R
            self._cos_sin = (np.cos(ang), np.sin(ang))
        return self._cos_sin

    def dlog_matrix(self, ns: np.ndarray) -> np.ndarray:
        """int32[len(ns), ngens] of discrete logs; -1 marks non-units."""
        ns = np.asarray(ns, dtype=np.int64)
        out = np.empty((len(ns), self.ngens), dtype=np.int32)
        for i, (mod, tab) in enumerate(zip(self.comp_mods, self.gen_dlogs)):
            out[:, i] = tab[ns % mod]
        # The modulus-2 component has a trivial unit group and thus no
        # generator column; mark its non-units here.
        if self.ngens:
            for comp in self.components:
                if not comp.gens and comp.modulus > 1:
                    out[ns % comp.modulus == 0] = -1
        return out

    def scan_dtab(self) -> np.ndarray:
        """Cached dlog matrix over one full period n = 1..q."""
        if self._dtab is None:
            self._dtab = self.dlog_matrix(np.arange(1, self.q + 1))
        return self._dtab

    def angle_matrix(self, ns: np.ndarray, exponents) -> np.ndarray:
        """Angle numerators mod R for one character; -1 for non-units."""
        ns = np.asarray(ns, dtype=np.int64)
        dm = self.dlog_matrix(ns)
        ew = np.array(
            [e * w for e, w in zip(exponents, self.weights)], dtype=np.int64
        )
        if self.ngens:
            ang = (dm.astype(np.int64) @ ew) % self.R
            bad = (dm < 0).any(axis=1)
        else:
            ang = np.zeros(len(ns), dtype=np.int64)
            bad = np.zeros(len(ns), dtype=bool)
        bad |= ~self.coprime_mask(ns)
        ang[bad] = -1
        return ang


class DirichletCharacter:
    """A character as an exponent vector over the group generators."""

    __slots__ = ("group", "exponents")

    def __init__(self, group: CharacterGroup, exponents: tuple[int, ...]):
        if len(exponents) != group.ngens:
            raise DomainError(
                f"expected {group.ngens} exponents, got {len(exponents)}"
            )
        self.group = group
        self.exponents = tuple(
            e % o for e, o in zip(exponents, group.gen_orders)
        )

    # -- basic structure ------------------------------------------------

    @property
    def q(self) -> int:
        return self.group.q

    def label(self) -> str:
        return f"{self.q}:" + ",".join(str(e) for e in self.exponents)

    def index(self) -> int:
        """Rank in lexicographic enumeration order."""
        r = 0
        for e, o in zip(self.exponents, self.group.gen_orders):
            r = r * o + e
        return r

    def is_principal(self) -> bool:
        return all(e == 0 for e in self.exponents)

    @property
    def order(self) -> int:
        return reduce(
            math.lcm,
            (o // math.gcd(o, e) for e, o in
             zip(self.exponents, self.group.gen_orders)),
            1,
        )

    def is_odd(self) -> bool:
        """True when the value at -1 is -1 (parity bit sum is odd)."""
        bits = sum(
            e & 1
            for e, f in zip(self.exponents, self.group.parity_flags)
            if f
        )
        return bits % 2 == 1

    def parity(self) -> str:
        return "odd" if self.is_odd() else "even"

    @property
    def conductor(self) -> int:
        cond = 1
        i = 0
        for comp in self.group.components:
            exps = self.exponents[i : i + len(comp.gens)]
            i += len(comp.gens)
            cond *= _component_conductor(comp, exps)
        return cond

    def is_primitive(self) -> bool:
        return self.conductor == self.q

    def __pow__(self, j: int) -> "DirichletCharacter":
        return DirichletCharacter(
            self.group, tuple(e * j for e in self.exponents)
        )

    def conjugate(self) -> "DirichletCharacter":
        return DirichletCharacter(
            self.group, tuple(-e for e in self.exponents)
        )

    def __mul__(self, other: "DirichletCharacter") -> "DirichletCharacter":
        if other.group is not self.group:
            raise DomainError("characters live on different groups")
        return DirichletCharacter(
            self.group,
            tuple(a + b for a, b in zip(self.exponents, other.exponents)),
        )

    def __eq__(self, other):
        if not isinstance(other, DirichletCharacter):
            return NotImplemented
        return self.q == other.q and self.exponents == other.exponents

    def __hash__(self):
        return hash((self.q, self.exponents))

    def __repr__(self):  # pragma: no cover
        return f"DirichletCharacter({self.label()!r})"

    # -- evaluation ------------------------------------------------------

    def value(self, n: int) -> UnitValue:
        """Exact value at n: zero off units, else e(angle/R)."""
        if n < 0:
            raise DomainError("value defined for n >= 0")
        if math.gcd(n, self.q) != 1:
            return UnitValue.ZERO
        dl = self.group.dlog_vector(n)
        if dl is None:
            return UnitValue.ZERO
        ang = sum(
            e * w * d
            for e, w, d in zip(self.exponents, self.group.weights, dl)
        )
        return UnitValue(ang, self.group.R)

    def angle_values(self, ns: np.ndarray) -> np.ndarray:
        """Vectorised angle numerators mod R (-1 for non-units)."""
        return self.group.angle_matrix(ns, self.exponents)

    def value_array(self, ns: np.ndarray) -> np.ndarray:
        ang = self.angle_values(ns)
        cos_t, sin_t = self.group.cos_sin_tables()
        good = ang >= 0
        safe = np.where(good, ang, 0)
        out = (cos_t[safe] + 1j * sin_t[safe]) * good
        return out

    def prime_values(self, primes: np.ndarray) -> np.ndarray:
        """Values at a prime array (protocol shared with twist specs)."""
        return self.value_array(primes)

    def ell_values(self, ns: np.ndarray) -> np.ndarray:
        """Exponents l with value = e(l / order); -1 for non-units.

        Angles of a character of order k are multiples of R/k, so the
        division below is exact.
        """
        ang = self.angle_values(ns)
        step = self.group.R // self.order
        return np.where(ang >= 0, ang // step, -1)


def _component_conductor(comp: _Component, exps) -> int:
    p = comp.prime
    if comp.modulus == 2 or not comp.gens:
        return 1
    if p == 2 and comp.exp >= 3:
        a, b = exps
        ord5 = comp.orders[1]
        d5 = ord5 // math.gcd(b, ord5)
        if d5 > 1:
            return 4 * d5
        return 4 if a % 2 == 1 else 1
    # Odd prime power (and modulus 4, where the same rule applies).
    (e1,) = exps
    o = comp.orders[0]
    d = o // math.gcd(e1, o)
    if d == 1:
        return 1
    v = 0
    while d % p == 0:
        d //= p
        v += 1
    return p ** (v + 1)


def build_group(q: int, table: PrimeTable) -> CharacterGroup:
    """Character group mod q with deterministic generator choices."""
    return CharacterGroup(q, table)


def enumerate_characters(
    group: CharacterGroup,
    order_divides: int | None = None,
    parity: str | None = None,
    primitive_only: bool = False,
):
    """Yield each character exactly once, exponent vectors in lex order."""
    if primitive_only and group.q in (1, 2):
        return
    for exps in itertools.product(*(range(o) for o in group.gen_orders)):
        chi = DirichletCharacter(group, exps)
        if order_divides is not None and order_divides % chi.order != 0:
            continue
        if parity is not None and chi.parity() != parity:
            continue
        if primitive_only and not chi.is_primitive():
            continue
        yield chi


def parse_character(label: str, table: PrimeTable) -> DirichletCharacter:
    """Parse the ``q:e1,e2,...`` serialization used in CSV and CLI."""
    try:
        qpart, _, epart = label.partition(":")
        q = int(qpart)
        exps = tuple(int(t) for t in epart.split(",") if t.strip() != "")
    except ValueError as exc:
        raise DomainError(f"malformed character spec {label!r}") from exc
    group = build_group(q, table)
    if len(exps) != group.ngens:
        raise DomainError(
            f"character spec {label!r}: expected {group.ngens} exponents"
        )
    return DirichletCharacter(group, exps)

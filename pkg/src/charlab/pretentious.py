"""Correlation sums, pretentious distances, and the odd-order savings.

Central objects, for a fixed odd g >= 3 and a character psi of order k:

* delta(g) = 1 - (g/pi) sin(pi/g), the savings exponent;
* the maximizer z_l in the g-th roots of unity (plus 0) of
  Re(z e(-l/k)), whose real part is cos((2 pi / g) ||g* l / k*||)
  with k* = k/gcd(g,k), g* = g/gcd(g,k);
* the correlation sum  S(y) = sum_{p <= y} max_z Re(z conj(psi)(p)) / p;
* the distance  D(f,h;x)^2 = sum_{p <= x} (1 - Re f(p) conj(h(p))) / p
  and its minimization over archimedean twists n^{it};
* the Fourier coefficients S_j of l -> cos((2 pi / g) ||g* l / k*||)
  on Z/k*, computed both by DFT and by an exact geometric closed form.

||t|| denotes the distance from t to the nearest integer.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .characters import UnitValue
from .errors import DomainError
from .primes import PrimeTable

ALPHA = 7.0 / 11.0  # exponent in the twist-window cutoff z = exp((log Q)^alpha)


def delta_g(g: int) -> float:
    """Savings exponent 1 - (g/pi) sin(pi/g); decreasing, in (0,1)."""
    if g < 3 or g % 2 == 0:
        raise DomainError(f"g must be odd and >= 3, got {g}")
    return 1.0 - (g / math.pi) * math.sin(math.pi / g)


@dataclass(frozen=True)
class OddOrderParams:
    """Coprime reduction of an (order g, order k) pair.

    k even forces k* even (hence >= 2), since gcd(g, k) is odd.
    """

    g: int
    k: int
    k_star: int
    g_star: int
    delta: float

    @classmethod
    def reduce(cls, g: int, k: int) -> "OddOrderParams":
        if k < 1:
            raise DomainError(f"k must be >= 1, got {k}")
        d = math.gcd(g, k)
        return cls(g, k, k // d, g // d, delta_g(g))


@dataclass(frozen=True)
class DistanceParams:
    """Cutoff bundle for distance work at a large modulus scale Q.

    z_cut = exp((log Q)^alpha) splits primes into a twist-sensitive
    range below and the savings range above; the t-window pairs with
    it as T = (log Q)^(-alpha).
    """

    x: float
    T: float
    Q: float
    alpha: float = ALPHA

    def __post_init__(self):
        if self.x < 16:
            raise DomainError(f"cutoff x must be >= 16, got {self.x}")
        if self.T <= 0:
            raise DomainError(f"window T must be positive, got {self.T}")

    @property
    def z_cut(self) -> float:
        return math.exp(math.log(self.Q) ** self.alpha)

    @classmethod
    def for_modulus_scale(cls, q: float) -> "DistanceParams":
        Q = math.log(q)
        return cls(x=Q, T=math.log(Q) ** (-ALPHA), Q=Q)


@dataclass(frozen=True)
class SelectedRoot:
    """Best root of unity aligned against e(-l/k)."""

    n: int  # z = e(n/g), n the nearest integer to l*g/k (ties round down)
    z: UnitValue
    cos_value: float  # = Re(z e(-l/k)) = cos((2 pi/g) ||g* l/k*||), always > 0
    direct_re: float  # Re(z e(-l/k)) evaluated directly, for cross-checks


def select_z(ell: int, k: int, g: int) -> SelectedRoot:
    """Maximizer of Re(z e(-l/k)) over the g-th roots of unity and 0.

    The nearest-integer angle is at most pi/g < pi/2 from the target,
    so the maximum is positive and never attained at z = 0.
    """
    if g < 3 or g % 2 == 0:
        raise DomainError(f"g must be odd and >= 3, got {g}")
    if not 0 <= ell < k:
        raise DomainError(f"need 0 <= ell < k, got ell={ell}, k={k}")
    # Nearest integer to ell*g/k, half-way cases rounded down.
    n = (2 * ell * g + k - 1) // (2 * k)
    dist_num = abs(ell * g - n * k)  # ||ell g / k|| = dist_num / k
    cos_value = math.cos(2.0 * math.pi * dist_num / (k * g))
    z = UnitValue(n % g, g)
    direct = (z.to_complex() * cmath.exp(-2j * math.pi * ell / k)).real
    return SelectedRoot(n % g, z, cos_value, direct)


def cos_theta_table(g: int, k: int) -> np.ndarray:
    """cos((2 pi/g) ||g l / k||) for l = 0..k-1 (vectorised)."""
    ell = np.arange(k, dtype=np.int64)
    r = (ell * g) % k
    dist = np.minimum(r, k - r) / k
    return np.cos(2.0 * np.pi * dist / g)


@dataclass(frozen=True)
class MeanIdentity:
    """Mean of the cos table against its tan closed form.

    The closed form (1-delta) * (pi/(g k*)) / tan(pi/(g k*)) matches the
    mean exactly when k is even (the order of an odd character always
    is); for odd k the mean exceeds it by a factor 1/cos(pi/(g k*)).
    """

    g: int
    k: int
    lhs: float
    rhs: float

    @property
    def abs_err(self) -> float:
        return abs(self.lhs - self.rhs)


def mean_identity(g: int, k: int) -> MeanIdentity:
    params = OddOrderParams.reduce(g, k)
    lhs = float(np.mean(cos_theta_table(g, k)))
    x = math.pi / (g * params.k_star)
    rhs = (1.0 - params.delta) * x / math.tan(x)
    return MeanIdentity(g, k, lhs, rhs)


# -- correlation sum ----------------------------------------------------


def corr_sum(y: float, psi, g: int, table: PrimeTable) -> float:
    """sum_{p <= y} max_{z in mu_g or 0} Re(z conj(psi)(p)) / p.

    Primes dividing the modulus of psi contribute 0 (their best
    correlation against the zero value is 0).
    """
    primes = table.primes_up_to(y)
    if len(primes) == 0:
        return 0.0
    k = psi.order
    ell = psi.ell_values(primes)
    weights = cos_theta_table(g, k)
    good = ell >= 0
    w = np.where(good, weights[np.where(good, ell, 0)], 0.0)
    return float(np.sum(w / primes))


# -- multiplicative-function specs and distances ------------------------


class PowerTwist:
    """The archimedean twist n^{it} restricted to primes."""

    def __init__(self, t: float):
        self.t = t

    def prime_values(self, primes: np.ndarray) -> np.ndarray:
        return np.exp(1j * self.t * np.log(primes.astype(np.float64)))


class ProductSpec:
    """Pointwise product of two prime-value providers."""

    def __init__(self, f, h):
        self.f = f
        self.h = h

    def prime_values(self, primes: np.ndarray) -> np.ndarray:
        return self.f.prime_values(primes) * self.h.prime_values(primes)


class TableSpec:
    """Synthetic spec: explicit values at chosen primes, default 1."""

    def __init__(self, values: dict[int, complex]):
        self.values = values

    def prime_values(self, primes: np.ndarray) -> np.ndarray:
        out = np.ones(len(primes), dtype=np.complex128)
        for i, p in enumerate(primes):
            v = self.values.get(int(p))
            if v is not None:
                out[i] = v
        return out


def distance2(f, h, x: float, table: PrimeTable) -> float:
    """D(f,h;x)^2 = sum_{p <= x} (1 - Re f(p) conj(h(p))) / p.

    A zero value on either side contributes (1 - 0)/p, per the literal
    definition.
    """
    primes = table.primes_up_to(x)
    if len(primes) == 0:
        return 0.0
    fv = f.prime_values(primes)
    hv = h.prime_values(primes)
    return float(np.sum((1.0 - (fv * np.conj(hv)).real) / primes))


@dataclass(frozen=True)
class MinDistance:
    """Grid-refined minimizer of t -> D(f, n^{it}; x)^2 over |t| <= T."""

    t: float
    value: float
    grid_spacing: float
    final_spacing: float


def min_distance_t(f, x: float, T: float, table: PrimeTable,
                   refinements: int = 3) -> MinDistance:
    """Grid search with spacing 1/(10 log x), then local 10x refinements.

    The grid is symmetric around 0, so the reported minimum never
    exceeds the t = 0 value.  Any grid scheme approximates the true
    continuous minimum; the final spacing is reported alongside.
    """
    if T <= 0:
        raise DomainError(f"T must be positive, got {T}")
    primes = table.primes_up_to(x)
    logp = np.log(primes.astype(np.float64))
    coeff = f.prime_values(primes) / primes
    base = float(np.sum(1.0 / primes))

    def eval_grid(ts: np.ndarray) -> np.ndarray:
        phase = np.exp(-1j * np.outer(ts, logp))
        return base - (phase @ coeff).real

    h = 1.0 / (10.0 * math.log(x))
    n = int(math.floor(T / h))
    ts = np.arange(-n, n + 1, dtype=np.float64) * h
    vals = eval_grid(ts)
    i = int(np.argmin(vals))
    best_t, best_v = float(ts[i]), float(vals[i])
    if n == 0:  # window below the base spacing: the grid is just t = 0
        return MinDistance(best_t, best_v, h, h)
    spacing = h
    for _ in range(refinements):
        spacing /= 10.0
        local = best_t + spacing * np.arange(-10, 11, dtype=np.float64)
        local = np.clip(local, -T, T)
        lv = eval_grid(local)
        j = int(np.argmin(lv))
        if lv[j] < best_v:
            best_t, best_v = float(local[j]), float(lv[j])
    return MinDistance(best_t, best_v, h, spacing)


# -- Fourier coefficients S_j -------------------------------------------


@dataclass
class SjTable:
    """DFT coefficients of l -> cos((2 pi/g) ||g* l/k*||) on Z/k*.

    values      closed-form evaluation (exact geometric sums);
    values_dft  FFT route; the two must agree to ~1e-10;
    l1_tail     sum_{j != 0} |S_j|, the log k* - growth quantity.
    """

    g: int
    g_star: int
    k_star: int
    values: np.ndarray
    values_dft: np.ndarray
    l1_tail: float = field(init=False)
    max_discrepancy: float = field(init=False)

    def __post_init__(self):
        self.l1_tail = float(np.sum(np.abs(self.values_dft[1:])))
        self.max_discrepancy = float(
            np.max(np.abs(self.values - self.values_dft))
        )


def _geom_sum(tau: int, n: int, denom: int) -> complex:
    """sum_{w=1}^{n} e(w tau / denom), exact angle reduction per term."""
    if n <= 0:
        return 0j
    if tau % denom == 0:
        return complex(n, 0)
    z = cmath.exp(2j * math.pi * (tau % denom) / denom)
    zn1 = cmath.exp(2j * math.pi * ((tau * (n + 1)) % denom) / denom)
    return (zn1 - z) / (z - 1.0)


def sj_closed_form(g: int, k_star: int, g_star: int | None = None) -> np.ndarray:
    """S_j via the split S_j = (S_j^+ + S_j^-)/2 and geometric sums.

    Substituting l -> a l with a = (g*)^{-1} mod k* turns each branch
    into two geometric progressions over w in (-k*/2, k*/2]:

        S_j^s = (1/k*) [ 1 + sum_{w=1}^{floor(k*/2)} e(w (s - a j g)/(g k*))
                           + sum_{v=1}^{ceil(k*/2)-1} e(v (s + a j g)/(g k*)) ].
    """
    if g_star is None:
        g_star = g
    if math.gcd(g_star, k_star) != 1:
        raise DomainError(f"need gcd(g*, k*) = 1, got {g_star}, {k_star}")
    if k_star == 1:
        return np.array([1.0])
    a = pow(g_star, -1, k_star)
    denom = g * k_star
    n_pos = k_star // 2
    n_neg = (k_star + 1) // 2 - 1
    out = np.empty(k_star, dtype=np.float64)
    for j in range(k_star):
        total = 0j
        for sign in (1, -1):
            s = 1.0 + _geom_sum(sign - a * j * g, n_pos, denom) \
                + _geom_sum(sign + a * j * g, n_neg, denom)
            total += s
        out[j] = (total / (2 * k_star)).real
    return out


def sj_dft(g: int, k_star: int, g_star: int | None = None) -> np.ndarray:
    """S_j by direct FFT of the cos table (numpy's sign convention
    e(-j l/k*) matches the definition)."""
    if g_star is None:
        g_star = g
    ell = np.arange(k_star, dtype=np.int64)
    r = (ell * g_star) % k_star
    dist = np.minimum(r, k_star - r) / k_star
    c = np.cos(2.0 * np.pi * dist / g)
    vals = np.fft.fft(c) / k_star
    return vals.real


def sj_table(g: int, k_star: int, g_star: int | None = None) -> SjTable:
    if g_star is None:
        g_star = g
    return SjTable(
        g, g_star, k_star,
        sj_closed_form(g, k_star, g_star),
        sj_dft(g, k_star, g_star),
    )


# -- the tan-based window function and its quadratic coefficient --------


def taylor_G(x: float) -> float:
    """G(x) = x / tan(x) on (0, pi)."""
    if not 0.0 < x < math.pi:
        raise DomainError(f"G(x) requires 0 < x < pi, got {x}")
    return x / math.tan(x)


def g_coefficient(x0: float = 0.2, levels: int = 6) -> float:
    """Quadratic coefficient c in G(x) = 1 - c x^2 + O(x^4).

    Richardson extrapolation of (1 - G(x))/x^2 along x0 / 2^i; the
    expansion is even in x, so the Neville tableau contracts by 4.
    Converges to 1/3 (cross-checked in tests), but computed rather
    than hard-coded.
    """
    xs = [x0 / 2**i for i in range(levels)]
    vals = [(1.0 - taylor_G(x)) / (x * x) for x in xs]
    tableau = list(vals)
    for m in range(1, levels):
        nxt = []
        for i in range(levels - m):
            r = 4.0**m
            nxt.append((r * tableau[i + 1] - tableau[i]) / (r - 1.0))
        tableau = nxt
    return tableau[0]


# -- the small-modulus optimization -------------------------------------


@dataclass(frozen=True)
class OptimalM:
    """Minimizer of f(m) = (1/2) log m + c1 loglog(Q) / m^2 over m > 1."""

    q_scale: float
    g: int
    c1: float
    m_real: float
    m_prime: int

    def objective(self, m: float) -> float:
        return 0.5 * math.log(m) + self.c1 * math.log(math.log(self.q_scale)) / m**2


def optimal_m(Q: float, g: int, c: float | None = None) -> OptimalM:
    """Stationary point m = sqrt(4 c1 loglog Q), c1 = alpha c pi^2 (1-delta)/g^2.

    Uses g* = g (the coprime-order case).  The nearest prime to the
    real minimizer is reported for the discrete choice.
    """
    if math.log(math.log(Q)) <= 0:
        raise DomainError(f"loglog Q must be positive, got Q={Q}")
    if c is None:
        c = g_coefficient()
    c1 = ALPHA * c * math.pi**2 * (1.0 - delta_g(g)) / g**2
    m_real = math.sqrt(4.0 * c1 * math.log(math.log(Q)))
    m_prime = _nearest_prime(m_real)
    return OptimalM(Q, g, c1, m_real, m_prime)


def _nearest_prime(x: float) -> int:
    from .primes import is_prime_64

    best, best_d = 2, abs(x - 2)
    n = 2
    while n - x <= best_d:
        if is_prime_64(n):
            d = abs(x - n)
            if d < best_d:
                best, best_d = n, d
        n += 1
    return best

"""Extremal-character construction pipeline.

Stages, for a fixed odd g >= 3 and a search ceiling M:

1. sift      primes m in (M/2, M] with 2 || (m-1) and every odd prime
             factor of (m-1)/2 above M^delta (direct enumeration);
2. pick_psi  an odd character psi mod m of order k >= (m-1)/2 whose
             values at the small primes p <= T stay within 1/N of 1;
3. build_chi a primitive character chi of order exactly g modulo some
             q (prime, = 1 mod g) chosen so that chi(p) hits the
             best-correlation root z_l whenever psi(p) = e(l/k), for
             as much 1/p-mass of small primes as possible;
4. report    the correlation sum, distance, decomposition residuals
             and the lower-bound proxy at the chosen prime horizon.

Thresholds follow two presets.  "paper" keeps the literal formulas
(T = log(m)/100 and friends), which contain no primes at any feasible
m and exist for documentation parity; "desk" uses populated ranges
with the same shape (see PipelineConfig).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .characters import (
    DirichletCharacter,
    UnitValue,
    build_group,
)
from .errors import DomainError, ResourceLimitError, SearchFailureError
from .pretentious import (
    OddOrderParams,
    corr_sum,
    delta_g,
    distance2,
    select_z,
    taylor_G,
)
from .primes import PrimeTable, factorize, primitive_root


# -- stage 1: sifted primes ----------------------------------------------


@dataclass(frozen=True)
class SiftedPrime:
    m: int
    factor_pairs: tuple[tuple[int, int], ...]  # factorization of m-1
    least_odd_prime: float  # least prime factor of (m-1)/2; inf if it is 1
    two_exact: bool  # 2 || (m-1)
    pminus_large: bool  # least_odd_prime > M^delta


@dataclass
class SiftReport:
    m_low: int
    m_high: int
    delta: float
    entries: list[SiftedPrime]
    predicted_count: float  # M / (log M)^2, diagnostic only

    @property
    def count(self) -> int:
        return len(self.entries)


def find_sifted_primes(m_low: int, m_high: int, delta: float,
                       table: PrimeTable, m_ref: int | None = None) -> SiftReport:
    """All primes in (m_low, m_high] passing both sift conditions.

    Direct enumeration over the sieve: exact, and at desk scale
    strictly stronger than a sieve-weight lower bound.  The classical
    density prediction M/(log M)^2 is attached as a diagnostic.
    """
    if not 0 < delta < 0.5:
        raise DomainError(f"delta must lie in (0, 1/2), got {delta}")
    m_ref = m_ref if m_ref is not None else m_high
    threshold = m_ref**delta
    primes = table.primes_up_to(m_high)
    entries = []
    for m in primes[primes > max(m_low, 2)]:
        m = int(m)
        if m % 4 != 3:  # 2 || (m-1) means m = 3 mod 4
            continue
        fac = factorize(m - 1, table)
        half = (m - 1) // 2
        least_odd = math.inf if half == 1 else factorize(half, table).least_prime()
        if least_odd > threshold:
            entries.append(
                SiftedPrime(m, fac.pairs, least_odd, True, True)
            )
    predicted = m_ref / math.log(m_ref) ** 2 if m_ref > 3 else 0.0
    return SiftReport(m_low, m_high, delta, entries, predicted)


# -- stage 1b: small-order counting ---------------------------------------


def count_small_order(m: int) -> int:
    """Characters mod a prime m with order below (m-1)/2.

    With xi a generator of the dual group, ord(xi^d) = (m-1)/gcd(d, m-1),
    so the count is #{1 <= d <= m-1 : gcd(d, m-1) > 2}.
    """
    n = m - 1
    return sum(1 for d in range(1, n + 1) if math.gcd(d, n) > 2)


def count_small_order_inclusion_exclusion(m: int, table: PrimeTable) -> int:
    """Same count by inclusion-exclusion over the conditions p | d for
    odd primes p | (m-1), plus 4 | d when 4 | (m-1)."""
    n = m - 1
    conds = [p for p, _ in factorize(n, table).pairs if p % 2 == 1]
    if n % 4 == 0:
        conds.append(4)
    total = 0
    for mask in range(1, 1 << len(conds)):
        l = 1
        bits = 0
        for i, c in enumerate(conds):
            if mask >> i & 1:
                l *= c
                bits += 1
        total += (-1) ** (bits + 1) * (n // l)
    return total


# -- stage 2: near-trivial odd characters of large order ------------------


@dataclass
class PsiCandidate:
    psi: DirichletCharacter
    order: int
    parity: str
    max_small_arg: float  # max_p |arg psi(p)| in rotation units
    small_prime_values: dict[int, UnitValue]


@dataclass
class NearOneScan:
    m: int
    T: float
    N: int
    candidates: list[PsiCandidate]
    scanned: int
    predicted_lower: float  # m exp(-2 T log N / log T), diagnostic


def near_one_search(m: int, T: float, N: int, table: PrimeTable,
                    exhaustive_limit: int = 2_000_000,
                    sample: int | None = None, seed: int = 0) -> NearOneScan:
    """Odd characters psi mod prime m with |psi(p) - 1| <= 1/N for all
    primes p <= T, p != m.

    |e(theta) - 1| = 2 |sin(pi theta)|, so the condition is exactly
    ||theta|| <= arcsin(1/(2N)) / pi in rotation units.  The scan over
    the m-1 characters is exhaustive below ``exhaustive_limit``;
    above it a seeded sample is required.
    """
    if not table.is_prime(m):
        raise DomainError(f"modulus {m} must be prime")
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    group = build_group(m, table)
    n = m - 1
    if n > exhaustive_limit and sample is None:
        raise ResourceLimitError(
            f"m - 1 = {n} exceeds exhaustive scan limit {exhaustive_limit}; "
            "pass a sample size"
        )
    if sample is None:
        ds = np.arange(1, n, 2, dtype=np.int64)  # odd d <=> odd character
    else:
        rng = np.random.default_rng(seed)
        ds = rng.choice(np.arange(1, n, 2, dtype=np.int64),
                        size=min(sample, (n + 1) // 2), replace=False)
        ds.sort()
    scanned = len(ds)
    small = [int(p) for p in table.primes_up_to(T) if p != m]
    window = math.asin(min(1.0, 1.0 / (2.0 * N))) / math.pi
    frac = None
    if small:
        dlogs = np.array(
            [int(group.dlog_vector(p)[0]) for p in small], dtype=np.int64
        )
        fr = (ds[:, None] * dlogs[None, :]) % n
        dist = np.minimum(fr, n - fr) / n
        keep = (dist <= window).all(axis=1)
        ds_keep = ds[keep]
        frac = fr[keep]
        arg = np.max(dist[keep], axis=1) if len(ds_keep) else np.empty(0)
    else:
        ds_keep = ds
        arg = np.zeros(len(ds))
    candidates = []
    for i, d in enumerate(ds_keep):
        d = int(d)
        psi = group.character((d,))
        vals = {}
        if small:
            vals = {
                p: UnitValue(int(frac[i, j]), n)
                for j, p in enumerate(small)
            }
        candidates.append(
            PsiCandidate(psi, n // math.gcd(d, n), "odd", float(arg[i]), vals)
        )
    if T > 2 and N >= 2:
        predicted = m * math.exp(-2.0 * T * math.log(N) / math.log(T))
    else:
        predicted = float((m - 1) // 2)
    return NearOneScan(m, T, N, candidates, scanned, predicted)


def pick_psi(m: int, T: float, N: int, g: int, table: PrimeTable,
             exhaustive_limit: int = 2_000_000,
             sample: int | None = None, seed: int = 0) -> PsiCandidate:
    """Large-order selection: order >= (m-1)/2, coprimality to g via
    the precondition gcd(m-1, g) = 1; smallest max_small_arg wins,
    ties by character index."""
    if math.gcd(m - 1, g) != 1:
        raise DomainError(f"gcd(m-1, g) = {math.gcd(m - 1, g)} != 1")
    res = near_one_search(m, T, N, table, exhaustive_limit, sample, seed)
    big = [c for c in res.candidates if c.order >= (m - 1) // 2]
    if not big:
        raise SearchFailureError(
            f"no odd character mod {m} of order >= {(m - 1) // 2} with "
            f"values within 1/{N} of 1 at primes <= {T}"
        )
    return min(big, key=lambda c: (c.max_small_arg, c.psi.index()))


# -- stage 3: the order-g character --------------------------------------


@dataclass
class ChiCandidateRecord:
    q: int
    chi: str
    agreement: float


@dataclass
class BuildChiResult:
    q: int
    chi: DirichletCharacter
    agreement: float
    targets: dict[int, int]  # small prime -> target exponent in Z/g
    per_q: list[ChiCandidateRecord]


def _z_targets(psi_cand: PsiCandidate, g: int, P: float,
               table: PrimeTable) -> dict[int, int]:
    """For each p <= P coprime to m: the exponent n with z_l = e(n/g),
    where psi(p) = e(l/k)."""
    psi = psi_cand.psi
    k = psi.order
    out = {}
    for p in table.primes_up_to(P):
        p = int(p)
        if p % psi.q == 0 or psi.q % p == 0:
            continue
        ell = int(psi.ell_values(np.array([p]))[0])
        if ell < 0:
            continue
        out[p] = select_z(ell, k, g).n
    return out


def default_q_candidates(g: int, q_max: int, table: PrimeTable) -> list[int]:
    """Primes q = 1 mod g up to q_max, ascending."""
    primes = table.primes_up_to(q_max)
    return [int(q) for q in primes[primes % g == 1]]


def build_chi(psi_cand: PsiCandidate, g: int, P: float, q_candidates,
              table: PrimeTable, products: bool = False) -> BuildChiResult:
    """Search characters of order exactly g for maximal agreement.

    agreement = (sum of 1/p over small p with chi(p) = z_l(p))
              / (sum of 1/p over small p coprime to q m), in [0, 1].

    chi(p) sits in the g-element subgroup of F_q*, so its exponent is
    read off from p^((q-1)/g) against powers of zeta = w^((q-1)/g)
    (w the canonical primitive root): no full discrete log needed.
    Ties break to the smallest q, then the smallest character index.
    """
    if g < 3 or g % 2 == 0:
        raise DomainError(f"g must be odd >= 3, got {g}")
    qs = list(q_candidates)
    if not qs:
        raise DomainError("empty q candidate set")
    m = psi_cand.psi.q
    targets = _z_targets(psi_cand, g, P, table)
    units = [t for t in range(1, g) if math.gcd(t, g) == 1]
    best = None  # (-agreement, q, index, exponents)
    per_q = []

    def consider(q, exps_by_t, cp, small):
        nonlocal best
        den = sum(1.0 / p for p in small)
        if den == 0.0:
            return
        best_here = None
        for key in sorted(exps_by_t):
            num = sum(
                1.0 / p for p in small
                if sum(t * c for t, c in zip(key, cp[p])) % g == targets[p]
            )
            agreement = num / den
            exps = exps_by_t[key]
            cand = (-agreement, q, exps)
            if best is None or cand < best:
                best = cand
            if best_here is None or -agreement < best_here[0]:
                best_here = (-agreement, exps)
        per_q.append(
            ChiCandidateRecord(
                q, f"{q}:" + ",".join(str(e) for e in best_here[1]),
                -best_here[0],
            )
        )

    for q in qs:
        small = [p for p in targets if p != q and q % p != 0]
        w0 = primitive_root(q)
        zeta = pow(w0, (q - 1) // g, q)
        zpows = {pow(zeta, j, q): j for j in range(g)}
        cp = {p: (zpows[pow(p, (q - 1) // g, q)],) for p in small}
        exps_by_t = {(t,): (t * (q - 1) // g,) for t in units}
        consider(q, exps_by_t, cp, small)

    if products:
        for i, q1 in enumerate(qs):
            for q2 in qs[i + 1 :]:
                q = q1 * q2
                if q > max(qs):
                    break
                small = [p for p in targets if q % p != 0 and p not in (q1, q2)]
                cp = {}
                zdata = []
                for qq in (q1, q2):
                    w0 = primitive_root(qq)
                    zeta = pow(w0, (qq - 1) // g, qq)
                    zdata.append({pow(zeta, j, qq): j for j in range(g)})
                for p in small:
                    cp[p] = tuple(
                        zdata[h][pow(p, ((q1, q2)[h] - 1) // g, (q1, q2)[h])]
                        for h in range(2)
                    )
                exps_by_t = {
                    (t1, t2): (t1 * (q1 - 1) // g, t2 * (q2 - 1) // g)
                    for t1 in units for t2 in units
                }
                consider(q, exps_by_t, cp, small)

    if best is None:
        raise SearchFailureError(
            "agreement score undefined: no small primes below the budget "
            f"P = {P} are coprime to the moduli"
        )
    agreement, q, exps = -best[0], best[1], best[2]
    group = build_group(q, table)
    chi = group.character(exps)
    per_q.sort(key=lambda r: r.q)
    return BuildChiResult(q, chi, agreement, targets, per_q)


# -- stage 4: decomposition and reports -----------------------------------


@dataclass
class DecompositionReport:
    """Exact correlation sum against its main + small-prime terms."""

    m: int
    k: int
    k_star: int
    g: int
    y: float
    P: float
    s_exact: float
    main_term: float
    small_prime_term: float
    residual: float


def spsig_decomposition(y: float, psi: DirichletCharacter, g: int, P: float,
                        table: PrimeTable) -> DecompositionReport:
    """Residual of the correlation sum against

        (1-delta) G(pi/(g k*)) log(log y / loglog m)
        + sum_l cos((2 pi/g)||g* l/k*||) sum_{p <= P, psi~(p)=e(l/k*)} 1/p,

    with psi~ = psi^gcd(g, k).  For a fixed psi the residual should be
    bounded as y sweeps; the envelope is reported, not asserted here.
    """
    if y < 16:
        raise DomainError(f"y must be >= 16, got {y}")
    m = psi.q
    params = OddOrderParams.reduce(g, psi.order)
    s_exact = corr_sum(y, psi, g, table)
    main = (
        (1.0 - params.delta)
        * taylor_G(math.pi / (g * params.k_star))
        * math.log(math.log(y) / math.log(math.log(m)))
    )
    psit = psi ** math.gcd(g, psi.order)
    primes = table.primes_up_to(P)
    small = 0.0
    if len(primes):
        ell = psit.ell_values(primes)
        cs = _cos_reduced(g, params.g_star, params.k_star)
        good = ell >= 0
        w = np.where(good, cs[np.where(good, ell, 0)], 0.0)
        small = float(np.sum(w / primes))
    return DecompositionReport(
        m, psi.order, params.k_star, g, y, P, s_exact, main, small,
        s_exact - main - small,
    )


def _cos_reduced(g: int, g_star: int, k_star: int) -> np.ndarray:
    ell = np.arange(k_star, dtype=np.int64)
    r = (ell * g_star) % k_star
    dist = np.minimum(r, k_star - r) / k_star
    return np.cos(2.0 * np.pi * dist / g)


@dataclass
class PipelineConfig:
    """Knobs for run_pipeline; None fields fall back to preset formulas.

    Desk preset: T = max(10, 2 log10 m), N = ceil(loglog M),
    p_agree = 10, p_small = 100 log m.  Paper preset keeps the literal
    forms T = p_agree = p_small = log(m)/100 (empty at desk scale) and
    the same N.  The horizon Y and the modulus scale M are independent
    knobs; the coupling m ~ sqrt(logloglog q) the analysis prescribes
    is recorded in the report, not enforced.
    """

    M: int
    g: int = 3
    preset: str = "desk"
    delta: float = 0.2
    T: float | None = None
    N: int | None = None
    p_agree: float | None = None
    p_small: float | None = None
    Y: float = 1e7
    q_max: int = 10**5
    q_products: bool = False
    exhaustive_limit: int = 2_000_000
    sample: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.preset not in ("desk", "paper"):
            raise DomainError(f"unknown preset {self.preset!r}")
        if self.g % 2 == 0 or self.g < 3:
            raise DomainError(f"g must be odd >= 3, got {self.g}")

    def threshold_T(self, m: int) -> float:
        if self.T is not None:
            return self.T
        if self.preset == "paper":
            return math.log(m) / 100.0
        return max(10.0, 2.0 * math.log10(m))

    def threshold_N(self) -> int:
        if self.N is not None:
            return self.N
        return max(1, math.ceil(math.log(math.log(self.M))))

    def threshold_p_agree(self, m: int) -> float:
        if self.p_agree is not None:
            return self.p_agree
        if self.preset == "paper":
            return math.log(m) / 100.0
        return 10.0

    def threshold_p_small(self, m: int) -> float:
        if self.p_small is not None:
            return self.p_small
        if self.preset == "paper":
            return math.log(m) / 100.0
        return 100.0 * math.log(m)


@dataclass
class ConstructionReport:
    """Full record of a pipeline run; numbers recomputable from ids."""

    config: PipelineConfig
    failed_stage: str | None = None
    fail_reason: str | None = None
    sift_count: int = 0
    sift_predicted: float = 0.0
    m: int | None = None
    m_factor_pairs: tuple | None = None
    psi: str | None = None
    k: int | None = None
    psi_parity: str | None = None
    psi_max_small_arg: float | None = None
    q: int | None = None
    chi: str | None = None
    chi_order: int | None = None
    chi_conductor: int | None = None
    agreement: float | None = None
    agreement_targets: dict | None = None
    horizon: float | None = None
    s_horizon: float | None = None
    sum_recip_horizon: float | None = None
    loglog_horizon: float | None = None
    dist2_horizon: float | None = None
    goal1_lhs: float | None = None
    goal1_rhs: float | None = None
    goal1_residual: float | None = None
    goal2_residual: float | None = None
    goal2_residual_loglog: float | None = None
    goal2_bound: float | None = None
    disagree_count: int | None = None
    disagree_mass: float | None = None
    decomposition: DecompositionReport | None = None
    lower_bound_proxy: float | None = None
    proxy_log_q_scale: float | None = None
    coupling_logloglog_q: float | None = None
    stage_candidates: list = field(default_factory=list)


def goal2_bookkeeping(chi: DirichletCharacter, psi: DirichletCharacter,
                      g: int, Y: float, table: PrimeTable) -> dict:
    """Exact disagreement accounting for the distance-vs-correlation gap.

    With P(Y) = sum_{p <= Y} 1/p,

        D(chi,psi;Y)^2 - (P(Y) - S(Y;psi,g))
            = sum_{p <= Y} (maxcos(p) - Re chi(p) conj(psi)(p)) / p,

    which is nonnegative and at most  2 sum_{disagree} 1/p
    + sum_{p | q m} 1/p, where "disagree" means chi(p) != z_{l(p)}.
    """
    primes = table.primes_up_to(Y)
    k = psi.order
    ell = psi.ell_values(primes)
    # target exponents n with z_l = e(n/g), vectorised half-down rounding
    ls = np.arange(k, dtype=np.int64)
    n_table = ((2 * ls * g + k - 1) // (2 * k)) % g
    chi_c = chi.ell_values(primes)  # exponents in Z/g, -1 off units
    psi_ok = ell >= 0
    chi_ok = chi_c >= 0
    agree = psi_ok & chi_ok & (chi_c == n_table[np.where(psi_ok, ell, 0)])
    disagree = psi_ok & chi_ok & ~agree
    div_qm = ~psi_ok | ~chi_ok
    inv_p = 1.0 / primes
    return {
        "disagree_count": int(np.sum(disagree)),
        "disagree_mass": float(np.sum(inv_p[disagree])),
        "bound": float(2.0 * np.sum(inv_p[disagree])
                       + np.sum(inv_p[div_qm])),
    }


def run_pipeline(config: PipelineConfig, table: PrimeTable) -> ConstructionReport:
    """Chain sift -> pick_psi -> build_chi -> decomposition.

    Any stage failure produces a partial report naming the stage.
    """
    report = ConstructionReport(config=config)
    g = config.g

    # Stage 1: sift.
    sift = find_sifted_primes(
        config.M // 2, config.M, config.delta, table, m_ref=config.M
    )
    report.sift_count = sift.count
    report.sift_predicted = sift.predicted_count
    usable = [e for e in sift.entries if math.gcd(e.m - 1, g) == 1]
    if not usable:
        report.failed_stage = "sift"
        report.fail_reason = (
            f"no sifted prime in ({config.M // 2}, {config.M}] with "
            f"gcd(m-1, {g}) = 1"
        )
        return report

    # Stage 2: psi, largest admissible m first.
    psi_cand = None
    chosen = None
    reasons = []
    for entry in sorted(usable, key=lambda e: -e.m):
        try:
            psi_cand = pick_psi(
                entry.m, config.threshold_T(entry.m), config.threshold_N(),
                g, table, config.exhaustive_limit, config.sample, config.seed,
            )
            chosen = entry
            break
        except SearchFailureError as exc:
            reasons.append(str(exc))
    if psi_cand is None:
        report.failed_stage = "pick_psi"
        report.fail_reason = reasons[-1] if reasons else "no sifted m admitted a psi"
        return report
    m = chosen.m
    report.m = m
    report.m_factor_pairs = chosen.factor_pairs
    report.psi = psi_cand.psi.label()
    report.k = psi_cand.order
    report.psi_parity = psi_cand.parity
    report.psi_max_small_arg = psi_cand.max_small_arg

    # Stage 3: chi.
    try:
        qs = default_q_candidates(g, config.q_max, table)
        built = build_chi(
            psi_cand, g, config.threshold_p_agree(m), qs, table,
            products=config.q_products,
        )
    except (DomainError, SearchFailureError) as exc:
        report.failed_stage = "build_chi"
        report.fail_reason = str(exc)
        return report
    report.q = built.q
    report.chi = built.chi.label()
    report.chi_order = built.chi.order
    report.chi_conductor = built.chi.conductor
    report.agreement = built.agreement
    report.agreement_targets = dict(sorted(built.targets.items()))
    report.stage_candidates = built.per_q

    # Stage 4: decomposition and proxies at the horizon.
    try:
        _pipeline_stage4(report, config, psi_cand, built, table)
    except (DomainError, ResourceLimitError) as exc:
        report.failed_stage = "decomposition"
        report.fail_reason = str(exc)
    return report


def _pipeline_stage4(report: ConstructionReport, config: PipelineConfig,
                     psi_cand: PsiCandidate, built: BuildChiResult,
                     table: PrimeTable) -> None:
    g = config.g
    m = psi_cand.psi.q
    Y = config.Y
    psi = psi_cand.psi
    chi = built.chi
    s_y = corr_sum(Y, psi, g, table)
    primes = table.primes_up_to(Y)
    sum_recip = float(np.sum(1.0 / primes))
    loglog_y = math.log(math.log(Y))
    d2 = distance2(chi, psi, Y, table)
    report.horizon = Y
    report.s_horizon = s_y
    report.sum_recip_horizon = sum_recip
    report.loglog_horizon = loglog_y
    report.dist2_horizon = d2

    k = psi_cand.order
    delta = delta_g(g)
    phi_m = m - 1
    report.goal1_lhs = loglog_y - s_y
    report.goal1_rhs = (
        (1.0 - (1.0 - delta) * taylor_G(math.pi / (g * k)))
        * (loglog_y - math.log(math.log(math.log(m))))
        + math.log(m / phi_m)
    )
    report.goal1_residual = report.goal1_lhs - report.goal1_rhs

    book = goal2_bookkeeping(chi, psi, g, Y, table)
    report.goal2_residual = d2 - (sum_recip - s_y)
    report.goal2_residual_loglog = d2 - (loglog_y - s_y)
    report.goal2_bound = book["bound"]
    report.disagree_count = book["disagree_count"]
    report.disagree_mass = book["disagree_mass"]

    report.decomposition = spsig_decomposition(
        Y, psi, g, config.threshold_p_small(m), table
    )

    q = built.q
    log_q = math.log(q)
    report.proxy_log_q_scale = log_q
    report.lower_bound_proxy = (
        math.sqrt(m) / phi_m * math.log(log_q) * math.exp(-d2)
    )
    report.coupling_logloglog_q = float(m * m)

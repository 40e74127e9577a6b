import math

import numpy as np
import pytest

from charlab.characters import build_group, enumerate_characters
from charlab.errors import DomainError
from charlab.pretentious import (
    OddOrderParams,
    PowerTwist,
    ProductSpec,
    TableSpec,
    corr_sum,
    cos_theta_table,
    delta_g,
    distance2,
    g_coefficient,
    mean_identity,
    min_distance_t,
    optimal_m,
    select_z,
    sj_dft,
    sj_table,
    taylor_G,
)


def test_delta_g_values():
    assert delta_g(3) == pytest.approx(1 - 3 * math.sqrt(3) / (2 * math.pi),
                                       abs=1e-15)
    assert delta_g(3) == pytest.approx(0.1730067, abs=1e-7)
    assert delta_g(5) == pytest.approx(1 - (5 / math.pi) * math.sin(math.pi / 5),
                                       abs=1e-15)
    assert delta_g(5) == pytest.approx(0.0645107, abs=1e-7)


def test_delta_g_monotone_to_zero():
    prev = delta_g(3)
    for g in range(5, 1002, 2):
        cur = delta_g(g)
        assert 0 < cur < prev
        prev = cur


def test_delta_g_domain():
    for bad in (1, 2, 4, -3):
        with pytest.raises(DomainError):
            delta_g(bad)


def test_select_z_examples():
    r = select_z(1, 4, 3)
    assert r.n == 1
    assert r.cos_value == pytest.approx(math.sqrt(3) / 2, abs=1e-15)
    r = select_z(0, 2, 3)
    assert r.n == 0 and r.cos_value == 1.0
    # tie ||1/2||: nearest integers 0 and 1 both give cos(pi/3); round down
    r = select_z(1, 6, 3)
    assert r.n == 0 and r.cos_value == pytest.approx(0.5, abs=1e-15)


def test_select_z_matches_brute_force_max():
    rng = np.random.default_rng(0)
    for _ in range(300):
        g = int(rng.choice([3, 5, 7, 9]))
        k = int(rng.integers(1, 80))
        ell = int(rng.integers(0, k))
        r = select_z(ell, k, g)
        brute = max(
            (math.cos(2 * math.pi * (n / g - ell / k)) for n in range(g)),
        )
        brute = max(brute, 0.0)
        assert r.cos_value == pytest.approx(brute, abs=1e-12)
        assert r.cos_value > 0


def test_mean_identity_pinned_point():
    mi = mean_identity(3, 2)
    assert mi.lhs == pytest.approx(0.75, abs=1e-15)
    assert mi.rhs == pytest.approx(0.75, abs=1e-12)


def test_mean_identity_example_g3_k4():
    mi = mean_identity(3, 4)
    brute = (1 + math.sqrt(3) / 2 + 0.5 + math.sqrt(3) / 2) / 4
    assert mi.lhs == pytest.approx(brute, abs=1e-15)
    assert mi.abs_err < 1e-12


def test_mean_identity_even_orders():
    for g in (3, 5, 7, 9, 11, 13, 15):
        for k in range(2, 301, 2):
            assert mean_identity(g, k).abs_err <= 1e-10, (g, k)


def test_mean_identity_odd_orders_cos_factor():
    """For odd k the mean exceeds the tan form by 1/cos(pi/(g k*));
    equivalently it equals sin(pi/g)/(k* sin(pi/(g k*)))."""
    for g in (3, 5, 9):
        for k in range(1, 100, 2):
            mi = mean_identity(g, k)
            ks = k // math.gcd(g, k)
            want = math.sin(math.pi / g) / (ks * math.sin(math.pi / (g * ks)))
            assert mi.lhs == pytest.approx(want, abs=1e-12)


def test_params_reduction():
    p = OddOrderParams.reduce(9, 6)
    assert (p.g_star, p.k_star) == (3, 2)
    assert math.gcd(p.g_star, p.k_star) == 1
    p = OddOrderParams.reduce(3, 100)
    assert (p.g_star, p.k_star) == (3, 100)
    # even k forces even k* (gcd with odd g is odd)
    for g in (3, 5, 9, 15):
        for k in range(2, 200, 2):
            assert OddOrderParams.reduce(g, k).k_star >= 2


def test_distance_params():
    from charlab.pretentious import DistanceParams

    dp = DistanceParams.for_modulus_scale(math.exp(100.0))
    assert dp.Q == pytest.approx(100.0)
    assert dp.z_cut == pytest.approx(math.exp(math.log(100.0) ** (7 / 11)))
    assert dp.T == pytest.approx(math.log(100.0) ** (-7 / 11))
    with pytest.raises(DomainError):
        DistanceParams(x=10.0, T=1.0, Q=100.0)
    with pytest.raises(DomainError):
        DistanceParams(x=20.0, T=0.0, Q=100.0)


def test_corr_sum_examples(table_small):
    # principal-like degenerate: k = 1 means every weight is 1
    g5 = build_group(5, table_small)
    principal = g5.principal()
    primes = table_small.primes_up_to(100)
    want = sum(1.0 / p for p in primes if p != 5)
    assert corr_sum(100, principal, 3, table_small) == pytest.approx(
        want, abs=1e-12
    )
    # empty sum below the first prime
    assert corr_sum(1.5, principal, 3, table_small) == 0.0
    # quadratic mod 5 at y = 10: (1/2)(1/2 + 1/3 + 1/7)
    quad = g5.character((2,))
    got = corr_sum(10, quad, 3, table_small)
    assert got == pytest.approx(0.5 * (1 / 2 + 1 / 3 + 1 / 7), abs=1e-14)


def test_corr_sum_upper_bound_and_conjugation(table_small):
    primes = table_small.primes_up_to(10**4)
    total = float(np.sum(1.0 / primes))
    for q in (11, 35, 101):
        grp = build_group(q, table_small)
        for chi in list(enumerate_characters(grp))[:6]:
            s = corr_sum(10**4, chi, 3, table_small)
            assert s <= total + 1e-12
            s_conj = corr_sum(10**4, chi.conjugate(), 3, table_small)
            assert s == pytest.approx(s_conj, abs=1e-12)


def test_distance2_definition(table_small):
    tw = PowerTwist(0.3)
    assert abs(distance2(tw, tw, 10**4, table_small)) < 1e-12
    # zero values contribute (1 - 0)/p
    grp = build_group(6, table_small)
    chi = [c for c in enumerate_characters(grp) if not c.is_principal()][0]
    d_self = distance2(chi, chi, 100, table_small)
    want = 1 / 2 + 1 / 3  # primes dividing 6
    assert d_self == pytest.approx(want, abs=1e-12)


def test_distance2_triangle_inequality(table_small):
    rng = np.random.default_rng(5)
    specs = []
    for q in (7, 11, 13, 101):
        grp = build_group(q, table_small)
        specs.extend(
            c for c in enumerate_characters(grp) if not c.is_principal()
        )
    for _ in range(100):
        f, w, h = (specs[int(rng.integers(0, len(specs)))] for _ in range(3))
        dfh = math.sqrt(distance2(f, h, 10**5, table_small))
        dfw = math.sqrt(distance2(f, w, 10**5, table_small))
        dwh = math.sqrt(distance2(w, h, 10**5, table_small))
        assert dfh <= dfw + dwh + 1e-9


def test_distance2_symmetry(table_small):
    grp = build_group(13, table_small)
    chars = [c for c in enumerate_characters(grp) if not c.is_principal()]
    a, b = chars[0], chars[3]
    assert distance2(a, b, 10**4, table_small) == pytest.approx(
        distance2(b, a, 10**4, table_small), abs=1e-12
    )


def test_corr_sum_bounds_distance(table_small):
    """1 - Re(chi psi~) >= 1 - maxcos termwise, so
    D(chi,psi;y)^2 >= sum 1/p - S(y;psi,g) for chi of order g."""
    grp7 = build_group(7, table_small)
    chi = [c for c in enumerate_characters(grp7) if c.order == 3][0]
    grp5 = build_group(5, table_small)
    for psi in enumerate_characters(grp5):
        if psi.is_principal():
            continue
        y = 10**4
        d2 = distance2(chi, psi, y, table_small)
        s = corr_sum(y, psi, 3, table_small)
        total = float(np.sum(1.0 / table_small.primes_up_to(y)))
        assert d2 >= total - s - 1e-9


def test_min_distance_recovers_twist(table_small):
    md = min_distance_t(PowerTwist(0.3), 10**4, 1.0, table_small)
    assert md.t == pytest.approx(0.3, abs=2e-3)
    assert md.value < 1e-4
    assert md.final_spacing == pytest.approx(md.grid_spacing / 1000)


def test_min_distance_tiny_window(table_small):
    grp = build_group(5, table_small)
    md = min_distance_t(grp.character((2,)), 10**4, 1e-6, table_small)
    assert md.t == 0.0


def test_min_distance_never_exceeds_t0(table_small):
    grp = build_group(7, table_small)
    for chi in enumerate_characters(grp):
        if chi.is_principal():
            continue
        md = min_distance_t(chi, 10**4, 0.5, table_small)
        d0 = distance2(chi, PowerTwist(0.0), 10**4, table_small)
        assert md.value <= d0 + 1e-12


def test_sj_table_example():
    t = sj_table(3, 2)
    assert t.values[0] == pytest.approx(0.75, abs=1e-14)
    assert t.values[1] == pytest.approx(0.25, abs=1e-14)
    assert t.max_discrepancy < 1e-12
    t1 = sj_table(3, 1)
    assert list(t1.values) == [1.0]


def test_sj_inverse_dft_reconstruction():
    for g, ks in ((3, 10), (5, 12), (7, 8)):
        t = sj_table(g, ks)
        ell = np.arange(ks)
        r = (ell * g) % ks
        cos_vals = np.cos(2 * np.pi * np.minimum(r, ks - r) / (ks * g))
        recon = np.real(
            [
                sum(
                    t.values_dft[j] * np.exp(2j * np.pi * j * l / ks)
                    for j in range(ks)
                )
                for l in ell
            ]
        )
        assert np.max(np.abs(recon - cos_vals)) < 1e-10


def test_sj_dual_computation_sweep():
    worst = 0.0
    for g in (3, 5, 7):
        for ks in range(2, 120):
            if math.gcd(g, ks) == 1:
                worst = max(worst, sj_table(g, ks).max_discrepancy)
    assert worst <= 1e-10


def test_sj_s0_equals_mean():
    for g, k in ((3, 4), (5, 8), (7, 300)):
        params = OddOrderParams.reduce(g, k)
        t = sj_table(g, params.k_star, params.g_star)
        assert t.values[0] == pytest.approx(mean_identity(g, k).lhs, abs=1e-12)


def test_sj_l1_growth():
    t = sj_table(3, 200)
    assert t.l1_tail / math.log(200) < 10


def test_taylor_G():
    assert taylor_G(math.pi / 6) == pytest.approx(
        (math.pi / 6) * math.sqrt(3), abs=1e-14
    )
    for x in (1e-4, 1e-3, 0.01):
        assert taylor_G(x) == pytest.approx(1.0, abs=1e-3)
    with pytest.raises(DomainError):
        taylor_G(0.0)
    with pytest.raises(DomainError):
        taylor_G(math.pi)


def test_g_coefficient_is_one_third():
    # series x/tan x = 1 - x^2/3 - x^4/45 - ...
    assert abs(g_coefficient() - 1.0 / 3.0) <= 1e-8


def test_optimal_m_stationarity():
    om = optimal_m(10**6, 3)
    # closed-form stationary point
    c1 = om.c1
    want = math.sqrt(4 * c1 * math.log(math.log(10**6)))
    assert om.m_real == pytest.approx(want, rel=1e-12)
    # spot minimality
    assert om.objective(om.m_real) <= om.objective(2 * om.m_real)
    assert om.objective(om.m_real) <= om.objective(om.m_real / 2)
    # derivative vanishes: (1/2)/m = 2 c1 loglogQ / m^3
    m = om.m_real
    assert 0.5 / m == pytest.approx(
        2 * c1 * math.log(math.log(10**6)) / m**3, rel=1e-10
    )


def test_table_and_product_specs(table_small):
    primes = table_small.primes_up_to(20)
    spec = TableSpec({2: -1.0, 3: 1j})
    vals = spec.prime_values(primes)
    assert vals[0] == -1.0 and vals[1] == 1j and vals[2] == 1.0
    prod = ProductSpec(spec, spec)
    vals2 = prod.prime_values(primes)
    assert vals2[0] == 1.0 and vals2[1] == -1.0

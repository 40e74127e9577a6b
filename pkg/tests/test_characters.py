import math
from collections import Counter

import numpy as np
import pytest

from charlab.characters import (
    UnitValue,
    build_group,
    enumerate_characters,
    parse_character,
)
from charlab.errors import DomainError
from helpers import brute_phi, jacobi


def test_unit_value_arithmetic():
    a = UnitValue(1, 3)
    b = UnitValue(1, 4)
    assert (a * b).reduced() == (7, 12)
    assert a.conj().reduced() == (2, 3)
    assert (a**3).reduced() == (0, 1)
    assert (UnitValue.ZERO * a) == UnitValue.ZERO
    assert abs(UnitValue(1, 2).to_complex() + 1) < 1e-15


def test_group_examples(table_small):
    g7 = build_group(7, table_small)
    assert g7.gen_orders == (6,) and g7.phi == 6
    g8 = build_group(8, table_small)
    assert g8.components[0].gens == (7, 5)
    assert g8.gen_orders == (2, 2)
    g1 = build_group(1, table_small)
    assert g1.phi == 1 and g1.ngens == 0


def test_group_structure_counts(table_small):
    for q in range(1, 120):
        grp = build_group(q, table_small)
        assert grp.phi == brute_phi(q)
        assert len(list(enumerate_characters(grp))) == grp.phi


def test_crt_reconstruction(table_small):
    for q in (45, 56, 60, 72, 360):
        grp = build_group(q, table_small)
        for n in range(1, q):
            if math.gcd(n, q) == 1:
                dv = grp.dlog_vector(n)
                assert dv is not None
                assert grp.reconstruct(dv) == n


def test_value_zero_off_units(table_small):
    grp = build_group(6, table_small)
    for chi in enumerate_characters(grp):
        assert chi.value(3) == UnitValue.ZERO
        assert chi.value(0) == UnitValue.ZERO


def test_cubic_character_mod_7(table_small):
    grp = build_group(7, table_small)
    chi = grp.character((2,))
    assert chi.value(3).reduced() == (1, 3)
    assert chi.value(2).reduced() == (2, 3)  # 2 = 3^2 mod 7
    assert chi.order == 3


def test_principal_values(table_small):
    grp = build_group(5, table_small)
    principal = grp.principal()
    assert principal.value(3) == UnitValue.ONE
    assert principal.conductor == 1


def test_complete_multiplicativity(table_small):
    rng = np.random.default_rng(0)
    for q in (8, 9, 16, 24, 45, 56, 60, 101):
        grp = build_group(q, table_small)
        chars = list(enumerate_characters(grp))
        for chi in chars[:: max(1, len(chars) // 4)]:
            for _ in range(25):
                a = int(rng.integers(0, 3 * q))
                b = int(rng.integers(0, 3 * q))
                assert chi.value(a * b) == chi.value(a) * chi.value(b)


def test_order_power_identity(table_small):
    grp = build_group(35, table_small)
    for chi in enumerate_characters(grp):
        k = chi.order
        for j in range(1, 2 * k):
            assert (chi**j).order == k // math.gcd(j, k)


def test_parity_matches_direct_value(table_small):
    for q in (5, 8, 12, 16, 24, 35, 36, 40, 48):
        grp = build_group(q, table_small)
        for chi in enumerate_characters(grp):
            want = (1, 2) if chi.is_odd() else (0, 1)
            assert chi.value(q - 1).reduced() == want


def test_odd_characters_count_mod_11(table_small):
    grp = build_group(11, table_small)
    odd = list(enumerate_characters(grp, parity="odd"))
    assert len(odd) == 5


def test_order_filter_mod_7(table_small):
    grp = build_group(7, table_small)
    sel = [
        c for c in enumerate_characters(grp, order_divides=3)
        if not c.is_principal()
    ]
    assert len(sel) == 2 and all(c.order == 3 for c in sel)


def test_enumeration_count_and_stability(table_small):
    grp = build_group(5, table_small)
    chars = list(enumerate_characters(grp))
    assert len(chars) == 4
    assert [c.exponents for c in chars] == [(0,), (1,), (2,), (3,)]


def test_conductor_examples(table_small):
    g12 = build_group(12, table_small)
    assert g12.principal().conductor == 1
    g5 = build_group(5, table_small)
    quad = g5.character((2,))
    assert quad.conductor == 5 and quad.is_primitive()
    g9 = build_group(9, table_small)
    ind = [c for c in enumerate_characters(g9) if c.order == 2]
    assert len(ind) == 1 and ind[0].conductor == 3
    # value agreement with the inducing quadratic character mod 3
    g3 = build_group(3, table_small)
    quad3 = g3.character((1,))
    for n in range(1, 19):
        if math.gcd(n, 9) == 1:
            assert ind[0].value(n) == quad3.value(n)


def test_conductor_brute_force(table_small):
    """Conductor = least f | q whose induced character matches on units."""
    for q in (8, 9, 12, 16, 24, 40, 45):
        grp = build_group(q, table_small)
        for chi in enumerate_characters(grp):
            best = None
            for f in range(1, q + 1):
                if q % f:
                    continue
                fgrp = build_group(f, table_small)
                for eta in enumerate_characters(fgrp):
                    if all(
                        chi.value(n) == eta.value(n)
                        for n in range(1, q + 1)
                        if math.gcd(n, q) == 1
                    ):
                        best = f
                        break
                if best is not None:
                    break
            assert chi.conductor == best, (q, chi.exponents)


def test_primitive_only_empty_for_tiny_moduli(table_small):
    for q in (1, 2):
        grp = build_group(q, table_small)
        assert list(enumerate_characters(grp, primitive_only=True)) == []


def test_orthogonality_exact_equidistribution(table_small):
    """Non-principal characters take each value in their image equally
    often on units, so the full-period sum is exactly zero."""
    for q in range(3, 201):
        grp = build_group(q, table_small)
        for chi in enumerate_characters(grp):
            if chi.is_principal():
                continue
            counts = Counter(
                chi.value(n).reduced()
                for n in range(1, q + 1)
                if math.gcd(n, q) == 1
            )
            assert len(counts) == chi.order
            assert len(set(counts.values())) == 1


def test_dual_orthogonality_spot_checks(table_small):
    rng = np.random.default_rng(7)
    for q in (12, 35, 40, 101, 200):
        grp = build_group(q, table_small)
        chars = list(enumerate_characters(grp))
        for _ in range(20):
            a = int(rng.integers(1, q))
            b = int(rng.integers(1, q))
            if math.gcd(a, q) > 1 or math.gcd(b, q) > 1:
                continue
            total = sum(
                (chi.value(a) * chi.value(b).conj()).to_complex()
                for chi in chars
            )
            want = grp.phi if a % q == b % q else 0.0
            assert abs(total - want) < 1e-9


def test_quadratic_matches_jacobi(table_small):
    for q in (11, 23, 101):
        grp = build_group(q, table_small)
        quad = grp.character(((q - 1) // 2,))
        for n in range(1, q):
            assert quad.value(n).to_complex().real == pytest.approx(
                jacobi(n, q), abs=1e-12
            )


def test_value_array_and_ell_values(table_small):
    grp = build_group(101, table_small)
    chi = grp.character((4,))
    ns = np.arange(0, 202)
    va = chi.value_array(ns)
    for n in ns:
        assert abs(va[n] - chi.value(int(n)).to_complex()) < 1e-13
    ell = chi.ell_values(ns)
    k = chi.order
    for n in ns:
        if math.gcd(int(n), 101) == 1:
            want = chi.value(int(n))
            got = UnitValue(int(ell[n]), k)
            assert want == got
        else:
            assert ell[n] == -1


def test_serialization_roundtrip(table_small):
    grp = build_group(40, table_small)
    for chi in enumerate_characters(grp):
        back = parse_character(chi.label(), table_small)
        assert back == chi
    with pytest.raises(DomainError):
        parse_character("40:1", table_small)  # wrong exponent count
    with pytest.raises(DomainError):
        parse_character("nonsense", table_small)


def test_group_component_resource_cap(table_small):
    from charlab.errors import ResourceLimitError

    big_prime = 10**7 + 19
    with pytest.raises(ResourceLimitError):
        build_group(big_prime, table_small)

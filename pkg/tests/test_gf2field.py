"""Field layer tests, checked against a coefficient-list schoolbook oracle."""

import random

import pytest

from etdr.errors import ParameterError
from etdr.gf2field import GF2, REDUCTION_POLY, gf_add, gf_mul, is_irreducible, reduction_poly


# ---------------------------------------------------------------- oracle

def _to_coeffs(v):
    return [(v >> i) & 1 for i in range(v.bit_length())]


def _from_coeffs(cs):
    return sum(c << i for i, c in enumerate(cs))


def oracle_mul(a, b, poly):
    """Schoolbook polynomial product then long division remainder, all on lists."""
    ca, cb, cp = _to_coeffs(a), _to_coeffs(b), _to_coeffs(poly)
    prod = [0] * (len(ca) + len(cb))
    for i, x in enumerate(ca):
        for j, y in enumerate(cb):
            prod[i + j] ^= x & y
    dp = len(cp) - 1
    for i in range(len(prod) - 1, dp - 1, -1):
        if prod[i]:
            for j in range(dp + 1):
                prod[i - dp + j] ^= cp[j]
    return _from_coeffs(prod[:dp])


# ---------------------------------------------------------------- basics

def test_worked_example_degree_3():
    # x * x^2 = x^3 = x + 1 under x^3 + x + 1
    assert gf_mul(0b010, 0b100, 3) == 0b011


def test_add_is_xor():
    assert gf_add(0b1100, 0b1010) == 0b0110


def test_zero_and_one():
    f = GF2.get(8)
    for a in range(256):
        assert f.mul(a, 0) == 0
        assert f.mul(a, 1) == a


def test_operand_domain_checked():
    with pytest.raises(ParameterError):
        gf_mul(1 << 8, 1, 8)
    with pytest.raises(ParameterError):
        gf_mul(1, -1, 8)


# ---------------------------------------------------------------- table

def test_table_covers_1_to_128_and_is_irreducible():
    assert set(REDUCTION_POLY) == set(range(1, 129))
    for d, p in REDUCTION_POLY.items():
        assert p.bit_length() == d + 1, f"degree {d} mask missing leading term"
        assert is_irreducible(p), f"degree {d} table entry reducible"


def test_known_minimal_polynomials():
    assert REDUCTION_POLY[2] == 0b111
    assert REDUCTION_POLY[3] == 0b1011
    assert REDUCTION_POLY[8] == 0x11B
    assert REDUCTION_POLY[64] == 0x1000000000000001B
    assert REDUCTION_POLY[128] == (1 << 128) | 0x87


def test_is_irreducible_agrees_with_trial_division_upto_degree_10():
    # independent sieve: p reducible iff some smaller irreducible divides it
    irr = []
    for p in range(2, 1 << 11):
        d = p.bit_length() - 1
        divisible = False
        for q in irr:
            if (q.bit_length() - 1) > d // 2:
                break
            if oracle_mod(p, q) == 0:
                divisible = True
                break
        if not divisible:
            irr.append(p)
        assert is_irreducible(p) == (not divisible), hex(p)


def oracle_mod(a, p):
    cp = _to_coeffs(p)
    ca = _to_coeffs(a)
    dp = len(cp) - 1
    for i in range(len(ca) - 1, dp - 1, -1):
        if ca[i]:
            for j in range(dp + 1):
                ca[i - dp + j] ^= cp[j]
    return _from_coeffs(ca[:dp])


def test_reduction_poly_search_beyond_table_matches_rule():
    # degree 130 is past the frozen table; the search must return an
    # irreducible with the table's shape rule (odd weight, leading+constant)
    p = reduction_poly(130)
    assert p.bit_length() == 131
    assert p & 1
    assert is_irreducible(p)
    assert reduction_poly(130) == p  # cached and deterministic


def test_reduction_poly_rejects_bad_degree():
    with pytest.raises(ParameterError):
        reduction_poly(0)


# ---------------------------------------------------------------- algebra

def test_oracle_agreement_exhaustive_degree_le_4():
    for d in (1, 2, 3, 4):
        poly = reduction_poly(d)
        f = GF2.get(d)
        for a in range(1 << d):
            for b in range(1 << d):
                assert f.mul(a, b) == oracle_mul(a, b, poly)


def test_oracle_agreement_random_degree_64():
    rng = random.Random(0xE7D1)
    poly = reduction_poly(64)
    for _ in range(10_000):
        a = rng.getrandbits(64)
        b = rng.getrandbits(64)
        assert gf_mul(a, b, 64) == oracle_mul(a, b, poly)


@pytest.mark.parametrize("degree", [2, 3, 8, 16, 64])
def test_distributivity_10k_triples(degree):
    rng = random.Random(degree * 7919)
    f = GF2.get(degree)
    for _ in range(10_000):
        a, b, c = (rng.getrandbits(degree) for _ in range(3))
        assert f.mul(a, b ^ c) == f.mul(a, b) ^ f.mul(a, c)


@pytest.mark.parametrize("degree", [2, 3, 8, 16, 64])
def test_associativity_and_commutativity(degree):
    rng = random.Random(degree + 1)
    f = GF2.get(degree)
    for _ in range(2_000):
        a, b, c = (rng.getrandbits(degree) for _ in range(3))
        assert f.mul(a, b) == f.mul(b, a)
        assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))


@pytest.mark.parametrize("degree", range(1, 9))
def test_nonzero_elements_form_a_group(degree):
    # closure without zero divisors, and every row of the Cayley table is a
    # permutation of the nonzero elements (existence of inverses)
    f = GF2.get(degree)
    nz = range(1, 1 << degree)
    for a in nz:
        row = {f.mul(a, b) for b in nz}
        assert 0 not in row
        assert len(row) == len(list(nz))
    for a in nz:
        assert f.pow(a, (1 << degree) - 1) == 1


@pytest.mark.parametrize("degree", [3, 8, 64, 92])
def test_fixed_mul_matches_general_mul(degree):
    rng = random.Random(degree)
    f = GF2.get(degree)
    for _ in range(20):
        k = rng.getrandbits(degree)
        mul_k = f.fixed_mul(k)
        for _ in range(200):
            a = rng.getrandbits(degree)
            assert mul_k(a) == f.mul(k, a)


def test_pow_small_cases():
    f = GF2.get(3)
    # x has order 7 under x^3 + x + 1
    seen = {f.pow(0b010, e) for e in range(7)}
    assert seen == set(range(1, 8))

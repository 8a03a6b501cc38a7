import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from belyi_cert.fppoly import (ModPoly, certify_irreducible, distinct_degree_factorization, factor,
                               factor_degree_pattern, irreducibility_certificate, is_squarefree,
                               reduce_mod, refines, subset_sums)
from belyi_cert.qpoly import UniPoly

X = sympy.Symbol("X")
PRIMES = [3, 5, 7, 11, 13, 101]


def test_small_patterns():
    assert factor_degree_pattern(ModPoly(3, [1, 0, 1])) == [2]
    assert factor_degree_pattern(ModPoly(5, [0, -1, 1])) == [1, 1]
    assert factor_degree_pattern(ModPoly(2, [1, 1, 1])) == [2]


def test_reduce_mod_rejects_bad_denominator():
    with pytest.raises(ValueError):
        reduce_mod(UniPoly([0, Fraction(1, 2)]), 2)
    assert reduce_mod(UniPoly([0, Fraction(1, 2)]), 3).degree == 1


def test_squarefree_detection():
    assert not is_squarefree(ModPoly(7, [1, 2, 1]))
    assert is_squarefree(ModPoly(7, [1, 0, 1]))


@st.composite
def squarefree_modpolys(draw):
    p = draw(st.sampled_from(PRIMES))
    n = draw(st.integers(1, 12))
    coeffs = draw(st.lists(st.integers(0, p - 1), min_size=n, max_size=n)) + [1]
    return ModPoly(p, coeffs)


@given(squarefree_modpolys())
def test_factors_multiply_back(f):
    if not is_squarefree(f):
        return
    parts = factor(f)
    prod = ModPoly(f.prime, [1])
    for g in parts:
        prod = prod * g
    assert prod.monic().coeffs == f.monic().coeffs
    assert sorted(g.degree for g in parts) == factor_degree_pattern(f)


@given(squarefree_modpolys())
def test_pattern_matches_sympy(f):
    if not is_squarefree(f):
        return
    g = sympy.Poly(list(reversed([int(c) for c in f.coeffs])), X, modulus=f.prime)
    want = sorted(h.degree() for h, _ in g.factor_list()[1] for _ in range(_))
    assert factor_degree_pattern(f) == want


@given(squarefree_modpolys())
def test_ddf_degrees_consistent(f):
    if not is_squarefree(f):
        return
    total = sum(g.degree for _, g in distinct_degree_factorization(f))
    assert total == f.degree
    for d, g in distinct_degree_factorization(f):
        assert g.degree % d == 0


def test_refines():
    assert refines([1, 1, 2], [2, 2])
    assert refines([5, 17], [22])
    assert not refines([3, 3], [2, 4])
    assert refines([1, 22, 77], [1, 22, 77])
    assert not refines([100], [1, 22, 77])


def test_subset_sums():
    assert subset_sums([1, 2]) == {0, 1, 2, 3}
    assert subset_sums([2, 2]) == {0, 2, 4}


def test_certificate_for_irreducible():
    f = UniPoly([-2, 0, 0, 0, 1])  # X^4 - 2, Eisenstein
    assert irreducibility_certificate(f) is not None
    cert = certify_irreducible(f)
    assert cert.proves_irreducible


def test_degree_sets_for_swinnerton_dyer_like():
    # X^4 + 1 splits mod every prime; a single prime can never work
    f = UniPoly([1, 0, 0, 0, 1])
    assert irreducibility_certificate(f) is None
    assert not certify_irreducible(f).proves_irreducible


def test_degree_sets_certificate():
    # X^4 - X - 1 has Galois group S4; certificate exists from some prime
    f = UniPoly([-1, -1, 0, 0, 1])
    assert certify_irreducible(f).proves_irreducible


@given(st.lists(st.integers(-6, 6), min_size=1, max_size=6), st.integers(-5, 5))
def test_no_certificate_with_rational_root(coeffs, r):
    g = UniPoly(coeffs + [1])
    f = g * UniPoly([-r, 1])
    cert = certify_irreducible(f, prime_budget=40)
    assert not cert.proves_irreducible


def test_random_products_never_certified():
    rng = random.Random(5)
    for _ in range(10):
        a = UniPoly([rng.randint(-5, 5) for _ in range(3)] + [1])
        b = UniPoly([rng.randint(-5, 5) for _ in range(4)] + [1])
        assert not certify_irreducible(a * b, prime_budget=40).proves_irreducible

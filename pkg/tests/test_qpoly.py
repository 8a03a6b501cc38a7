from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st
from sympy.polys.subresultants_qq_zz import sylvester

from belyi_cert.qpoly import (FactoredPoly, UniPoly, bivariate_text, discriminant, discriminant_at,
                              expand, format_poly, gcd, integer_resultant, is_rational_square,
                              same_square_class, squarefree_decomposition, squarefree_part)

X = sympy.Symbol("X")

small = st.fractions(min_value=-20, max_value=20, max_denominator=6)
polys = st.lists(small, min_size=0, max_size=7).map(UniPoly)
nonzero = st.lists(small, min_size=1, max_size=6).filter(lambda c: any(c)).map(UniPoly)
int_polys = st.lists(st.integers(-9, 9), min_size=2, max_size=7).filter(lambda c: c[-1] != 0).map(UniPoly)


def to_sympy(f: UniPoly):
    return sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(f.coeffs)] or [0], X,
                      domain="QQ")


def from_sympy(g) -> UniPoly:
    return UniPoly([Fraction(int(c.p), int(c.q)) for c in reversed(g.all_coeffs())])


@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a - a == UniPoly()
    assert a * b == b * a


@given(polys, nonzero)
def test_division_identity(a, b):
    q, r = divmod(a, b)
    assert q * b + r == a
    assert r.is_zero() or r.degree < b.degree


@given(polys, nonzero)
def test_exact_div(a, b):
    assert (a * b).exact_div(b) == a


@given(polys, polys)
def test_product_degree_and_derivative(a, b):
    if a and b:
        assert (a * b).degree == a.degree + b.degree
    assert (a * b).derivative() == a.derivative() * b + a * b.derivative()


@given(polys, small)
def test_evaluation_is_a_homomorphism(a, v):
    b = a * a + UniPoly.const(3)
    assert b.evaluate_at(v) == a.evaluate_at(v) ** 2 + 3


@given(polys, polys)
def test_gcd_matches_sympy(a, b):
    if a.is_zero() and b.is_zero():
        with pytest.raises(ValueError):
            gcd(a, b)
        return
    want = sympy.gcd(to_sympy(a), to_sympy(b))
    assert gcd(a, b) == from_sympy(want.monic())


@given(int_polys, int_polys, int_polys)
def test_gcd_recovers_common_factor(a, b, c):
    g = gcd(a * c, b * c)
    assert (g // c.monic()) * c.monic() == g  # c | g
    assert ((a * c) % g).is_zero()


@given(int_polys, int_polys)
def test_squarefree_decomposition(a, b):
    f = a * b * b
    parts = squarefree_decomposition(f)
    prod = UniPoly.const(1)
    for m, part in parts:
        assert part.lc == 1
        prod = prod * part ** m
    assert prod == f.monic()
    # sympy oracle
    _, want = sympy.sqf_list(to_sympy(f))
    want_map = {}
    for g, m in want:
        want_map[m] = from_sympy(g.monic())
    assert {m: p for m, p in parts} == want_map


@given(int_polys)
def test_discriminant_matches_sympy(a):
    if a.degree < 1:
        return
    assert discriminant(a) == Fraction(str(sympy.discriminant(to_sympy(a))))


@given(st.lists(st.integers(-50, 50), min_size=2, max_size=8), st.lists(st.integers(-50, 50), min_size=2, max_size=8))
def test_resultant_matches_sympy(a, b):
    if a[-1] == 0 or b[-1] == 0:
        return
    # Sylvester determinant; sympy.resultant mis-signs some inputs, e.g. (X + 1, X^3)
    want = sylvester(to_sympy(UniPoly(a)).as_expr(), to_sympy(UniPoly(b)).as_expr(), X).det()
    assert integer_resultant(a, b) == int(want)


def test_resultant_sign_convention():
    assert integer_resultant([1, 1], [0, 0, 0, 1]) == -1
    assert integer_resultant([0, 0, 0, 1], [1, 1]) == 1


def test_discriminant_examples():
    x = UniPoly.x()
    assert discriminant(x * x - UniPoly.const(2)) == 8
    assert discriminant(x ** 3 - UniPoly.const(1)) == -27
    assert discriminant(x * x - 2 * x + UniPoly.const(1)) == 0


def test_discriminant_at_rejects_degree_drop():
    x = UniPoly.x()
    p, q = x ** 2, x ** 2 + UniPoly.const(1)
    with pytest.raises(ValueError, match="degree drops"):
        discriminant_at(p, q, 1)
    assert discriminant_at(p, q, 2) == discriminant(p - 2 * q)


def test_square_classes():
    assert is_rational_square(Fraction(9, 4))
    assert not is_rational_square(-4)
    assert not is_rational_square(Fraction(2, 1))
    assert same_square_class(2, 8)
    assert same_square_class(Fraction(-3, 4), -12)
    assert not same_square_class(2, -2)
    assert not same_square_class(3, 5)
    with pytest.raises(ValueError):
        same_square_class(0, 1)
    assert squarefree_part(Fraction(-72, 5)) == -10
    assert squarefree_part(1) == 1


@given(st.integers(1, 10 ** 6), st.integers(1, 1000), st.sampled_from([-1, 1]))
def test_squarefree_part_is_a_class_invariant(n, k, s):
    assert squarefree_part(s * n * k * k) == squarefree_part(s * n)
    assert same_square_class(s * n, squarefree_part(s * n))


def test_format_poly():
    x = UniPoly.x()
    assert format_poly(x ** 4 - 8 * x ** 3 + UniPoly.const(1)) == "X^4 - 8*X^3 + 1"
    assert format_poly(UniPoly()) == "0"
    assert format_poly(-x) == "-X"


def test_factored_expand():
    x = UniPoly.x()
    f = FactoredPoly(3, [(x - UniPoly.const(1), 2), (x, 1)])
    assert f.degree == 3
    assert f.lc == 3
    assert expand(f) == UniPoly([0, 3, -6, 3])
    assert f.bases_coprime()
    assert not FactoredPoly(1, [(x, 1), (2 * x, 1)]).bases_coprime()


def test_bivariate_text():
    x = UniPoly.x()
    p, q = x ** 2, x - UniPoly.const(1)
    assert bivariate_text(p, q, (0, 1)) == "X^2 - X*t + t"
    # s = 0 leaves p alone
    assert bivariate_text(p, q, (0,)) == "X^2"
    assert bivariate_text(p, q, (1, 0, 2)) == "X^2 - 2*X*t^2 - X + 2*t^2 + 1"

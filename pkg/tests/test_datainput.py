import pytest
from hypothesis import given, strategies as st

from belyi_cert.datainput import (MalformedCycles, ParseError, PointOutOfRange, RepeatedPoint,
                                  format_cycles, format_factored, load_dataset, parse_cycles,
                                  parse_dataset, parse_poly_expr, validate_dataset)
from belyi_cert.permgroup import Permutation
from belyi_cert.qpoly import UniPoly, expand


def test_parse_cycles_basic():
    p = parse_cycles("(1, 3, 2)(4,5)", 6)
    assert p(1) == 3 and p(3) == 2 and p(2) == 1
    assert p(4) == 5 and p(6) == 6
    assert parse_cycles("", 4).is_identity()
    assert parse_cycles("  (1,2)\n (3, 4)  ", 4) == Permutation.from_cycles([(1, 2), (3, 4)], 4)


@pytest.mark.parametrize("text, exc, token", [
    ("(1, 2", MalformedCycles, None),
    ("(1, 2))", MalformedCycles, ")"),
    ("(1,,2)", MalformedCycles, ","),
    ("((1, 2))", MalformedCycles, "("),
    ("1, 2", MalformedCycles, "1"),
    ("(1, a)", MalformedCycles, "a"),
    ("(1)()", MalformedCycles, ")"),
    ("(1, 2,)", MalformedCycles, ")"),
    ("(1, 7)", PointOutOfRange, "7"),
    ("(0, 1)", PointOutOfRange, "0"),
    ("(1, 2)(2, 3)", RepeatedPoint, "2"),
])
def test_parse_cycles_errors(text, exc, token):
    with pytest.raises(exc) as info:
        parse_cycles(text, 6)
    assert isinstance(info.value, ParseError)
    assert info.value.token == token
    if token is not None:
        assert text[info.value.position:].startswith(token)


@given(st.permutations(list(range(1, 13))))
def test_cycle_format_roundtrip(images):
    p = Permutation(tuple(images))
    text = format_cycles(p)
    assert parse_cycles(text, 12) == p
    assert format_cycles(parse_cycles(text, 12)) == text


def test_parse_poly_expr():
    f = parse_poly_expr("3^3 * (X^4 - 8X^3 + 1)^5 * (X - 1)")
    assert f.constant == 27
    assert [(b.degree, e) for b, e in f.factors] == [(4, 5), (1, 1)]
    assert f.degree == 21
    x = UniPoly.x()
    assert expand(f) == 27 * (x ** 4 - 8 * x ** 3 + UniPoly.const(1)) ** 5 * (x - UniPoly.const(1))
    g = parse_poly_expr("-2*X^2 + X")
    assert expand(g) == UniPoly([0, 1, -2])
    assert expand(parse_poly_expr("X ** 2")) == x * x


@pytest.mark.parametrize("text", ["(X + 1", "X^", "X ^^ 2", "Y + 1", "3 *", "X^-1"])
def test_parse_poly_errors(text):
    with pytest.raises(ParseError):
        parse_poly_expr(text)


def test_factored_format_roundtrip(dataset):
    for key in ("p", "q"):
        f = parse_poly_expr(dataset.map_text[key])
        again = parse_poly_expr(format_factored(f))
        assert again.constant == f.constant
        assert again.factors == f.factors
        assert format_factored(again) == format_factored(f)


def test_dataset_toml_roundtrip(dataset):
    again = parse_dataset(dataset.to_toml())
    assert again.name == dataset.name
    assert again.expect == dataset.expect
    assert again.permutations() == dataset.permutations()
    assert again.to_toml() == dataset.to_toml()


def test_bundled_shapes(ds1, ds2):
    f1, f2 = ds1.map_spec(), ds2.map_spec()
    assert (f1.p.degree, f1.q.degree) == (100, 100)
    assert (f2.p.degree, f2.q.degree) == (100, 100)
    assert parse_cycles("()", 5).is_identity()


def test_validation_passes(dataset):
    checks = validate_dataset(dataset)
    assert checks and all(c.status == "pass" for c in checks), [c for c in checks if c.status != "pass"]


def test_unknown_dataset():
    with pytest.raises(FileNotFoundError):
        load_dataset("hs-map-3")


def _corrupt(text: str, old: str, new: str) -> str:
    assert old in text
    return text.replace(old, new, 1)


def test_corrupted_triple_points_at_culprit(ds1):
    d = parse_dataset(ds1.to_toml())
    x = d.permutations()[0]
    cyc = next(c for c in x.cycles() if len(c) == 5)
    a, b = cyc[0], cyc[1]
    # swap two points inside one x-cycle: cycle type survives, product does not
    orig = format_cycles(Permutation.from_cycles([cyc], d.degree))
    bad = format_cycles(Permutation.from_cycles([(b, a) + tuple(cyc[2:])], d.degree))
    d.triple_text["x"] = d.triple_text["x"].replace(orig.replace(", ", ","), bad.replace(", ", ","))
    if d.triple_text["x"] == ds1.triple_text["x"]:
        d.triple_text["x"] = ds1.triple_text["x"].replace(orig, bad)
    assert d.triple_text["x"] != ds1.triple_text["x"]
    checks = {c.id: c for c in validate_dataset(d)}
    prod = checks["triple.product"]
    assert prod.status == "fail"
    assert a in prod.witness["moved_points"] or b in prod.witness["moved_points"]
    assert any(s.startswith("x:") for s in prod.witness["suspect_cycles"])


def test_repeated_point_names_cycle(ds2):
    d = parse_dataset(ds2.to_toml())
    x = d.permutations()[0]
    c0, c1 = x.cycles()[:2]
    d.triple_text["x"] = d.triple_text["x"] + "(%d, %d)" % (c0[0], c1[0])
    check = next(c for c in validate_dataset(d) if c.id == "parse.x")
    assert check.status == "fail"
    assert "repeated point" in check.witness["error"]
    assert check.witness["cycle"] is not None


def test_wrong_degree_in_expectations(ds1):
    d = parse_dataset(ds1.to_toml())
    d.expect["degree_q"] = 99
    check = next(c for c in validate_dataset(d) if c.id == "map.q.shape")
    assert check.status == "fail"
    assert check.witness["degree"] == 100

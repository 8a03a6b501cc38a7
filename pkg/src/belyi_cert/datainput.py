"""Parsers for cycle notation and factored polynomial text, plus the bundled datasets.

Datasets are TOML files with ``[triple]``, ``[map]`` and ``[expect]`` tables
holding the listings as quoted strings, kept close to the printed notation
so they can be diffed by eye.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import tomli

from .permgroup import CycleType, Permutation, compose, cycle_type, inverse
from .qpoly import FactoredPoly, UniPoly, format_poly
from .report import Check


class ParseError(ValueError):
    def __init__(self, message: str, position: int | None = None, token: str | None = None):
        self.position = position
        self.token = token
        where = "" if position is None else " at position %d" % position
        what = "" if token is None else " (token %r)" % token
        super().__init__(message + where + what)


class MalformedCycles(ParseError):
    pass


class PointOutOfRange(ParseError):
    pass


class RepeatedPoint(ParseError):
    pass


_CYCLE_TOKEN = re.compile(r"\s*(?:(\()|(\))|(,)|(-?\d+)|(\S))")


def parse_cycles(text: str, degree: int) -> Permutation:
    """Parse ``(1, 64, 8)(2, 20)`` style listings; unlisted points are fixed.

    A lone ``()`` is the identity, as printed by ``format_cycles``.
    """
    if text.strip() == "()":
        return Permutation.identity(degree)
    cycles: list[list[int]] = []
    current: list[int] | None = None
    seen: dict[int, int] = {}
    expect_point = False
    pos = 0
    while pos < len(text):
        m = _CYCLE_TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        start = m.start(m.lastindex)
        pos = m.end()
        opening, closing, comma, number, other = m.groups()
        if opening:
            if current is not None:
                raise MalformedCycles("nested '('", start, "(")
            current = []
            expect_point = True
        elif closing:
            if current is None:
                raise MalformedCycles("')' without matching '('", start, ")")
            if not current or expect_point and len(current) > 0:
                raise MalformedCycles("empty cycle or dangling comma", start, ")")
            cycles.append(current)
            current = None
        elif comma:
            if current is None or expect_point:
                raise MalformedCycles("unexpected ','", start, ",")
            expect_point = True
        elif number:
            if current is None:
                raise MalformedCycles("point outside parentheses", start, number)
            pt = int(number)
            if not 1 <= pt <= degree:
                raise PointOutOfRange("point out of range 1..%d" % degree, start, number)
            if pt in seen:
                raise RepeatedPoint("repeated point %d (first seen in cycle %d)" % (pt, seen[pt] + 1),
                                    start, number)
            seen[pt] = len(cycles)
            current.append(pt)
            expect_point = False
        else:
            raise MalformedCycles("unexpected character", start, other)
    if current is not None:
        raise MalformedCycles("unclosed '('", len(text), None)
    return Permutation.from_cycles(cycles, degree)


def format_cycles(perm: Permutation) -> str:
    return str(perm)


# --- polynomial expressions ----------------------------------------------

_POLY_TOKEN = re.compile(r"\s*(?:(\d+)|([Xx])|(\*\*|[-+*^()·−]))")


def _tokenize_poly(text: str):
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _POLY_TOKEN.match(text, pos)
        if m is None:
            bad = text[pos:].lstrip()
            raise ParseError("unexpected character", len(text) - len(text[pos:].lstrip()), bad[:1])
        num, var, op = m.groups()
        start = m.start(m.lastindex)
        if num:
            tokens.append(("num", int(num), start))
        elif var:
            tokens.append(("x", None, start))
        else:
            op = {"·": "*", "−": "-", "**": "^"}.get(op, op)
            tokens.append(("op", op, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _PolyParser:
    """Recursive descent; products are returned as lists of (node, exponent) factors.

    Nodes are UniPoly values except at the top level, where the factor list
    is kept so the printed factorization survives parsing.
    """

    def __init__(self, text: str):
        self.tokens = _tokenize_poly(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, op):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ParseError("expected %r" % op, pos, "" if val is None else str(val))

    def parse_top(self) -> FactoredPoly:
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0)
        terms = self.parse_sum_terms()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError("unexpected token", pos, str(val))
        if len(terms) == 1:
            sign, factors = terms[0]
            const = Fraction(sign)
            out = []
            for node, e in factors:
                if node.degree <= 0:
                    const *= node[0] ** e
                else:
                    out.append((node, e))
            return FactoredPoly(const, out)
        total = self._sum(terms)
        if total.degree <= 0:
            return FactoredPoly(total[0], [])
        return FactoredPoly(1, [(total, 1)])

    def _sum(self, terms) -> UniPoly:
        total = UniPoly()
        for sign, factors in terms:
            prod = UniPoly([sign])
            for node, e in factors:
                prod = prod * node ** e
            total = total + prod
        return total

    def parse_sum_terms(self):
        terms = []
        sign = 1
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        terms.append((sign, self.parse_product()))
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                terms.append((-1 if val == "-" else 1, self.parse_product()))
            else:
                return terms

    def parse_product(self):
        factors = [self.parse_power()]
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val == "*":
                self.take()
                factors.append(self.parse_power())
            elif kind == "num":
                raise ParseError("missing operator before number", pos, str(val))
            elif kind == "x" or (kind == "op" and val == "("):
                prev_kind, prev_val, _ = self.tokens[self.i - 1]
                # implicit products: "8X^3", "2(X + 1)", ")("
                if prev_kind == "num" or (prev_kind == "op" and prev_val == ")" and kind == "op"):
                    factors.append(self.parse_power())
                else:
                    raise ParseError("missing operator", pos, "X" if kind == "x" else "(")
            else:
                return factors

    def parse_power(self):
        node = self.parse_atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "num":
                raise ParseError("exponent must be a nonnegative integer", pos,
                                 "" if val is None else str(val))
            return node, val
        return node, 1

    def parse_atom(self) -> UniPoly:
        kind, val, pos = self.take()
        if kind == "num":
            return UniPoly([val])
        if kind == "x":
            return UniPoly.x()
        if kind == "op" and val == "(":
            node = self._sum(self.parse_sum_terms())
            self.expect(")")
            return node
        if kind == "op" and val == "-":
            inner, e = self.parse_power()
            return -(inner ** e)
        raise ParseError("unexpected token", pos, "end of input" if kind == "end" else str(val))


def parse_poly_expr(text: str) -> FactoredPoly:
    """Parse a factored polynomial such as ``3^3 * (X^4 - 8X^3 + 1)^5 * (X - 1)``.

    The top-level product structure is preserved; numeric factors fold into
    the constant.
    """
    return _PolyParser(text).parse_top()


def format_factored(f: FactoredPoly) -> str:
    parts = []
    if f.constant != 1 or not f.factors:
        parts.append(str(f.constant))
    for base, e in f.factors:
        text = "(%s)" % format_poly(base)
        parts.append(text if e == 1 else "%s^%d" % (text, e))
    return " * ".join(parts)


# --- datasets -------------------------------------------------------------

BUNDLED = ("hs-map-1", "hs-map-2")


@dataclass
class Dataset:
    name: str
    degree: int
    triple_text: dict[str, str]
    map_text: dict[str, str]
    expect: dict = field(default_factory=dict)
    source: str | None = None

    def permutations(self) -> tuple[Permutation, Permutation, Permutation]:
        x = parse_cycles(self.triple_text["x"], self.degree)
        y = parse_cycles(self.triple_text["y"], self.degree)
        if "z" in self.triple_text:
            z = parse_cycles(self.triple_text["z"], self.degree)
        else:
            z = inverse(compose(x, y))
        return x, y, z

    def map_spec(self):
        from .belyi import BelyiMapSpec

        return BelyiMapSpec.from_dataset(self)

    def expected_cycle_types(self) -> dict[str, CycleType]:
        return {k: CycleType.parse(v) for k, v in self.expect["cycle_types"].items()}

    def to_toml(self) -> str:
        lines = ['name = "%s"' % self.name, "degree = %d" % self.degree, "", "[triple]"]
        for k, v in self.triple_text.items():
            lines.append('%s = """\n%s\n"""' % (k, v.strip()))
        lines += ["", "[map]"]
        for k, v in self.map_text.items():
            lines.append('%s = """\n%s\n"""' % (k, v.strip()))
        lines += ["", "[expect]"]
        for k, v in self.expect.items():
            lines.append("%s = %s" % (k, _toml_value(v)))
        return "\n".join(lines) + "\n"


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        return '"%s"' % v.replace("\\", "\\\\").replace('"', '\\"')
    if isinstance(v, list):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{ " + ", ".join("%s = %s" % (k, _toml_value(x)) for k, x in v.items()) + " }"
    raise TypeError("cannot serialize %r" % (v,))


def parse_dataset(text: str, source: str | None = None) -> Dataset:
    raw = tomli.loads(text)
    return Dataset(
        name=raw["name"],
        degree=int(raw["degree"]),
        triple_text=dict(raw["triple"]),
        map_text=dict(raw["map"]),
        expect=dict(raw.get("expect", {})),
        source=source,
    )


def load_dataset(name_or_path: str | Path) -> Dataset:
    """Load a bundled dataset by name, or any dataset file by path."""
    path = Path(name_or_path)
    if path.suffix == ".toml" and path.exists():
        return parse_dataset(path.read_text(), str(path))
    if str(name_or_path) in BUNDLED:
        res = resources.files("belyi_cert") / "data" / ("%s.toml" % name_or_path)
        return parse_dataset(res.read_text(), "bundled:%s" % name_or_path)
    raise FileNotFoundError("unknown dataset %r" % str(name_or_path))


def _cycle_of(perm_text: str, point: int) -> str | None:
    for m in re.finditer(r"\(([^)]*)\)", perm_text):
        pts = [int(v) for v in re.findall(r"\d+", m.group(1))]
        if point in pts:
            return "(" + m.group(1).strip() + ")"
    return None


def validate_dataset(d: Dataset) -> list[Check]:
    """Transcription integrity checks.  Findings are reported verbatim, never repaired."""
    checks: list[Check] = []
    ref = "listings of the triple and the map"
    perms: dict[str, Permutation] = {}
    for key in ("x", "y", "z"):
        if key not in d.triple_text:
            continue
        try:
            perms[key] = parse_cycles(d.triple_text[key], d.degree)
            checks.append(Check("parse." + key, ref, "pass", {"cycles": len(perms[key].cycles())}))
        except ParseError as exc:
            cyc = _cycle_of(d.triple_text[key], int(exc.token)) if exc.token and exc.token.isdigit() else None
            checks.append(Check("parse." + key, ref, "fail",
                                {"error": str(exc), "cycle": cyc}))
    if "x" in perms and "y" in perms:
        x, y = perms["x"], perms["y"]
        if "z" in perms:
            prod = compose(compose(x, y), perms["z"])
            moved = prod.moved_points()
            witness = {"moved_points": moved[:20]}
            if moved:
                witness["suspect_cycles"] = sorted({
                    "%s:%s" % (k, _cycle_of(d.triple_text[k], pt))
                    for pt in moved for k in ("x", "y", "z")
                    if _cycle_of(d.triple_text[k], pt)})[:12]
            checks.append(Check("triple.product", "x*y*z = 1", "pass" if not moved else "fail", witness))
        else:
            perms["z"] = inverse(compose(x, y))
            checks.append(Check("triple.z_defined", "z := (xy)^-1", "pass", {}))
    expected = d.expect.get("cycle_types", {})
    for key, perm in perms.items():
        if key in expected:
            got = cycle_type(perm)
            want = CycleType.parse(expected[key])
            witness = {"expected": str(want), "found": str(got)}
            if got != want and key in d.triple_text:
                # cycles whose length is over-represented are the likeliest culprits
                bad = [c for c in perm.cycles(include_fixed=True)
                       if dict(want.parts).get(len(c), 0) < dict(got.parts).get(len(c), 0)]
                witness["suspect_cycles"] = [str(Permutation.from_cycles([c], d.degree))
                                             if len(c) > 1 else "(%d)" % c[0] for c in bad[:8]]
            checks.append(Check("triple.cycle_type." + key, "cycle structure table",
                                "pass" if got == want else "fail", witness))
    for key, want in expected.items():
        total = CycleType.parse(want).degree
        if total != d.degree:
            checks.append(Check("expect.cycle_type_sum." + key, "cycle structure table", "fail",
                                {"sum": total, "degree": d.degree}))
    for key in ("p", "q"):
        if key not in d.map_text:
            checks.append(Check("parse." + key, "f = p/q", "fail", {"error": "missing"}))
            continue
        try:
            f = parse_poly_expr(d.map_text[key])
        except ParseError as exc:
            checks.append(Check("parse." + key, "f = p/q", "fail", {"error": str(exc)}))
            continue
        want_deg = d.expect.get("degree_" + key, d.degree)
        ok = f.degree == want_deg and f.bases_coprime()
        checks.append(Check("map.%s.shape" % key, "factorizations of p and q", "pass" if ok else "fail",
                            {"degree": f.degree, "expected_degree": want_deg,
                             "leading_coefficient": str(f.lc),
                             "bases": [[b.degree, e] for b, e in f.factors]}))
    return checks

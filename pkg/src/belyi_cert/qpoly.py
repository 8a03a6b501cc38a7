"""Exact univariate polynomials over Q.

Coefficients are :class:`fractions.Fraction`, lowest degree first.  Heavy
products go through integer arithmetic after clearing denominators; gcds and
discriminants use multi-modular computation with exact verification or an
explicit bound, so every answer is exact.

Discriminant convention: disc(f) = (-1)^(n(n-1)/2) * res(f, f') / lc(f).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import sympy

from . import _modular as mod

Rational = Fraction | int


def _lcm(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def _int_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


@dataclass(frozen=True)
class UniPoly:
    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Iterable[Rational] = ()):
        c = [Fraction(v) for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def x(cls) -> "UniPoly":
        return cls([0, 1])

    @classmethod
    def const(cls, v: Rational) -> "UniPoly":
        return cls([v])

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def integer_form(self) -> tuple[Fraction, list[int]]:
        """Return (content, primitive integer coefficients with positive leading term)."""
        if not self.coeffs:
            return Fraction(0), []
        den = _lcm(c.denominator for c in self.coeffs)
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for v in ints:
            g = math.gcd(g, v)
        if ints[-1] < 0:
            g = -g
        return Fraction(g, den), [v // g for v in ints]

    def _scaled_ints(self) -> tuple[int, list[int]]:
        den = _lcm(c.denominator for c in self.coeffs) if self.coeffs else 1
        return den, [int(c * den) for c in self.coeffs]

    def __add__(self, other) -> "UniPoly":
        other = _coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self) -> "UniPoly":
        return UniPoly(-c for c in self.coeffs)

    def __sub__(self, other) -> "UniPoly":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "UniPoly":
        return _coerce(other) - self

    def __mul__(self, other) -> "UniPoly":
        if isinstance(other, (int, Fraction)):
            return UniPoly(c * other for c in self.coeffs)
        da, a = self._scaled_ints()
        db, b = other._scaled_ints()
        return UniPoly(Fraction(v, da * db) for v in _int_mul(a, b))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "UniPoly":
        if k < 0:
            raise ValueError("negative exponent")
        result, base = UniPoly([1]), self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __divmod__(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        db = other.degree
        inv = 1 / other.lc
        quo = [Fraction(0)] * max(0, len(rem) - db)
        bc = other.coeffs
        for k in range(len(rem) - 1, db - 1, -1):
            c = rem[k] * inv
            if c:
                quo[k - db] = c
                off = k - db
                for j in range(db + 1):
                    rem[off + j] -= c * bc[j]
        return UniPoly(quo), UniPoly(rem[:db])

    def __floordiv__(self, other: "UniPoly") -> "UniPoly":
        return divmod(self, other)[0]

    def __mod__(self, other: "UniPoly") -> "UniPoly":
        return divmod(self, other)[1]

    def exact_div(self, other: "UniPoly") -> "UniPoly":
        q, r = divmod(self, other)
        if r:
            raise ArithmeticError("division is not exact")
        return q

    def derivative(self) -> "UniPoly":
        return UniPoly(i * c for i, c in enumerate(self.coeffs) if i)

    def evaluate_at(self, value: Rational):
        acc = Fraction(0) if isinstance(value, (int, Fraction)) else 0
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        return self * (1 / self.lc)

    def compose_linear(self, a: Rational, b: Rational) -> "UniPoly":
        """self(a*X + b)."""
        result = UniPoly()
        lin = UniPoly([b, a])
        for c in reversed(self.coeffs):
            result = result * lin + UniPoly([c])
        return result

    def to_text(self, var: str = "X") -> str:
        return format_poly(self, var)

    def __str__(self) -> str:
        return self.to_text()


def _coerce(v) -> UniPoly:
    return v if isinstance(v, UniPoly) else UniPoly([v])


def format_poly(f: UniPoly, var: str = "X") -> str:
    """Canonical text: descending degree, explicit ``*`` and ``^``."""
    if f.is_zero():
        return "0"
    terms = []
    for k in range(f.degree, -1, -1):
        c = f.coeffs[k]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if k == 0:
            body = str(mag)
        else:
            mono = var if k == 1 else "%s^%d" % (var, k)
            body = mono if mag == 1 else "%s*%s" % (mag, mono)
        terms.append((sign, body))
    text = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        text += " %s %s" % (sign, body)
    return text


@dataclass(frozen=True)
class FactoredPoly:
    """constant * prod(base ** exponent), kept unexpanded."""

    constant: Fraction
    factors: tuple[tuple[UniPoly, int], ...]

    def __init__(self, constant: Rational, factors: Iterable[tuple[UniPoly, int]] = ()):
        object.__setattr__(self, "constant", Fraction(constant))
        object.__setattr__(self, "factors", tuple((b, int(e)) for b, e in factors))
        for _, e in self.factors:
            if e < 1:
                raise ValueError("exponents must be positive")

    @property
    def degree(self) -> int:
        return sum(b.degree * e for b, e in self.factors)

    @property
    def lc(self) -> Fraction:
        out = self.constant
        for b, e in self.factors:
            out *= b.lc ** e
        return out

    def bases_coprime(self) -> bool:
        bases = [b for b, _ in self.factors]
        return all(gcd(bases[i], bases[j]).degree == 0
                   for i in range(len(bases)) for j in range(i + 1, len(bases)))

    def __mul__(self, other: "FactoredPoly") -> "FactoredPoly":
        return FactoredPoly(self.constant * other.constant, self.factors + other.factors)


def expand(f: FactoredPoly) -> UniPoly:
    result = UniPoly([f.constant])
    for base, e in f.factors:
        result = result * base ** e
    return result


# --- gcd and squarefree decomposition ------------------------------------

def _int_divides(a: list[int], b: list[int]) -> bool:
    """Whether integer polynomial b divides a over Q."""
    return not divmod(UniPoly(a), UniPoly(b))[1]


def gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd over Q by multi-modular reconstruction with exact trial division."""
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    _, A = a.integer_form()
    _, B = b.integer_form()
    if len(A) == 1 or len(B) == 1:
        return UniPoly([1])
    lc_gcd = math.gcd(A[-1], B[-1])
    best_deg = None
    residues: list[list[int]] = []
    moduli: list[int] = []
    previous = None
    for p in mod.large_primes(4000):
        if A[-1] % p == 0 or B[-1] % p == 0:
            continue
        g = mod.gcd_mod(A, B, p)
        d = len(g) - 1
        if d == 0:
            return UniPoly([1])
        if best_deg is None or d < best_deg:
            best_deg, residues, moduli, previous = d, [], [], None
        elif d > best_deg:
            continue
        residues.append([c * lc_gcd % p for c in g])
        moduli.append(p)
        combined = []
        for k in range(d + 1):
            v, m = mod.crt([r[k] for r in residues], moduli)
            combined.append(mod.symmetric(v, m))
        if combined == previous:
            cand = UniPoly(combined)
            _, C = cand.integer_form()
            if _int_divides(A, C) and _int_divides(B, C):
                return UniPoly(C).monic()
        previous = combined
    raise ArithmeticError("gcd reconstruction did not converge")


def squarefree_decomposition(a: UniPoly) -> list[tuple[int, UniPoly]]:
    """Yun's algorithm: [(multiplicity, monic part)], nonconstant parts only.

    lc(a) * prod(part ** multiplicity) == a.
    """
    if a.is_zero():
        raise ValueError("squarefree decomposition of zero")
    if a.degree == 0:
        return []
    b = a.derivative()
    c = gcd(a, b)
    w = a.exact_div(c)
    y = b.exact_div(c)
    z = y - w.derivative()
    out = []
    i = 1
    while w.degree > 0:
        g = gcd(w, z) if z else w.monic()
        if g.degree > 0:
            out.append((i, g))
        w = w.exact_div(g)
        y = z.exact_div(g) if z else UniPoly()
        z = y - w.derivative()
        i += 1
    return [(m, part.monic()) for m, part in out]


# --- discriminants -------------------------------------------------------

def _hadamard_bits(a: list[int], b: list[int]) -> int:
    """Bit bound for |res(a, b)| from the Sylvester-matrix row norms."""
    n, m = len(a) - 1, len(b) - 1
    sa = sum(c * c for c in a)
    sb = sum(c * c for c in b)
    return (m * sa.bit_length() + n * sb.bit_length()) // 2 + 1


def integer_resultant(a: list[int], b: list[int]) -> int:
    """Exact res(a, b) of integer polynomials via CRT over primes in (2^30, 2^31)."""
    bits = _hadamard_bits(a, b) + 2
    need = bits // 30 + 2
    candidates = [p for p in mod.large_primes(need + 64) if a[-1] % p and b[-1] % p]
    primes = candidates[:need]
    if len(primes) < need:
        raise ArithmeticError("not enough admissible primes")
    residues = mod.resultant_batch(a, b, primes)
    value, modulus = mod.crt(residues, primes)
    return mod.symmetric(value, modulus)


def integer_discriminant(a: list[int]) -> int:
    n = len(a) - 1
    da = [i * c for i, c in enumerate(a)][1:]
    res = integer_resultant(a, da)
    q, r = divmod(res, a[-1])
    if r:
        raise ArithmeticError("resultant not divisible by leading coefficient")
    return -q if (n * (n - 1) // 2) % 2 else q


def discriminant(f: UniPoly) -> Fraction:
    n = f.degree
    if n < 1:
        raise ValueError("discriminant needs degree >= 1")
    if n == 1:
        return Fraction(1)
    content, ints = f.integer_form()
    return content ** (2 * n - 2) * integer_discriminant(ints)


def specialize(p: UniPoly, q: UniPoly, t0: Rational) -> UniPoly:
    return p - q * Fraction(t0)


def discriminant_at(p: UniPoly, q: UniPoly, t0: Rational, expected_degree: int | None = None) -> Fraction:
    """Exact discriminant of p(X) - t0*q(X)."""
    f = specialize(p, q, t0)
    want = max(p.degree, q.degree) if expected_degree is None else expected_degree
    if f.degree != want:
        raise ValueError("degree drops to %d at t0 = %s" % (f.degree, t0))
    return discriminant(f)


# --- square classes -------------------------------------------------------

def is_rational_square(v: Rational) -> bool:
    v = Fraction(v)
    if v < 0:
        return False
    num, den = v.numerator, v.denominator
    return math.isqrt(num) ** 2 == num and math.isqrt(den) ** 2 == den


def same_square_class(a: Rational, b: Rational) -> bool:
    """Whether a/b is a nonzero rational square, i.e. a and b have equal signed squarefree parts."""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("square classes are defined for nonzero values")
    return is_rational_square(a * b)


def _odd_part(n: int) -> int:
    out = 1
    for prime, e in sympy.factorint(n).items():
        if e % 2:
            out *= prime
    return out


def squarefree_part(v: Rational) -> int:
    """Signed product of the primes occurring to odd power in numerator and denominator."""
    v = Fraction(v)
    if v == 0:
        raise ValueError("squarefree part of zero")
    s = _odd_part(abs(v.numerator)) * _odd_part(v.denominator)
    return -s if v < 0 else s


def bivariate_text(p: UniPoly, q: UniPoly, subst: Sequence[int]) -> str:
    """Canonical text of p(X) - s(t)*q(X), where ``subst`` lists s's integer coefficients in t.

    Terms ``c*X^i*t^j`` ordered by descending X-degree, then descending t-degree.
    """
    terms: dict[tuple[int, int], Fraction] = {}
    for i in range(max(p.degree, q.degree) + 1):
        if p[i]:
            terms[(i, 0)] = terms.get((i, 0), Fraction(0)) + p[i]
        for j, s in enumerate(subst):
            if s and q[i]:
                terms[(i, j)] = terms.get((i, j), Fraction(0)) - q[i] * s
    items = sorted(((k, c) for k, c in terms.items() if c), key=lambda kc: (-kc[0][0], -kc[0][1]))
    if not items:
        return "0"
    parts = []
    for (i, j), c in items:
        mono = []
        if i:
            mono.append("X" if i == 1 else "X^%d" % i)
        if j:
            mono.append("t" if j == 1 else "t^%d" % j)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = "*".join(mono)
        else:
            body = "*".join([str(mag)] + mono)
        parts.append(("-" if c < 0 else "+", body))
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        text += " %s %s" % (sign, body)
    return text

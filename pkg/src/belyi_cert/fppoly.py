"""Polynomials over prime fields: distinct-degree factorization and irreducibility evidence.

Arithmetic runs on numpy int64 vectors (lowest degree first).  Matrix-vector
products sum up to ~100 products of residues, so primes must stay below
2**28.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import _modular as mod
from .qpoly import UniPoly

MAX_PRIME = 1 << 28


class BadPrime(ValueError):
    """The prime divides a coefficient denominator (or is otherwise unusable)."""


class NotSquarefree(ValueError):
    pass


def _trim(a: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(a)
    return a[: nz[-1] + 1] if nz.size else a[:0]


@dataclass(frozen=True)
class ModPoly:
    prime: int
    coeffs: tuple[int, ...]

    def __init__(self, prime: int, coeffs: Iterable[int]):
        if prime >= MAX_PRIME:
            raise ValueError("prime must be below 2**28")
        c = [int(v) % prime for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "prime", prime)
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def _from_array(cls, prime: int, arr: np.ndarray) -> "ModPoly":
        return cls(prime, arr.tolist())

    def array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=np.int64)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def monic(self) -> "ModPoly":
        return ModPoly(self.prime, mod.monic(list(self.coeffs), self.prime))

    def __mul__(self, other: "ModPoly") -> "ModPoly":
        return ModPoly._from_array(self.prime, _mul(self.array(), other.array(), self.prime))

    def __sub__(self, other: "ModPoly") -> "ModPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.zeros(n, dtype=np.int64)
        a[: len(self.coeffs)] += self.array()
        a[: len(other.coeffs)] -= other.array()
        return ModPoly._from_array(self.prime, a % self.prime)

    def derivative(self) -> "ModPoly":
        return ModPoly(self.prime, mod.derivative_mod(list(self.coeffs), self.prime))

    def __divmod__(self, other: "ModPoly"):
        q, r = _divmod(self.array(), other.array(), self.prime)
        return ModPoly._from_array(self.prime, q), ModPoly._from_array(self.prime, r)

    def __str__(self) -> str:
        terms = ["%d*X^%d" % (c, k) for k, c in reversed(list(enumerate(self.coeffs))) if c]
        return (" + ".join(terms) or "0") + " (mod %d)" % self.prime


def _mul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if a.size == 0 or b.size == 0:
        return a[:0]
    if min(a.size, b.size) * (p - 1) ** 2 < (1 << 63):
        return np.convolve(a, b) % p
    # split the shorter operand to keep partial sums in range
    out = np.zeros(a.size + b.size - 1, dtype=np.int64)
    for i, c in enumerate(a.tolist()):
        if c:
            out[i: i + b.size] = (out[i: i + b.size] + c * b) % p
    return out


def _divmod(a: np.ndarray, b: np.ndarray, p: int):
    b = _trim(b)
    if b.size == 0:
        raise ZeroDivisionError("polynomial division by zero")
    r = _trim(a.copy())
    db = b.size - 1
    if r.size - 1 < db:
        return r[:0], r
    inv = pow(int(b[-1]), -1, p)
    q = np.zeros(r.size - db, dtype=np.int64)
    for k in range(r.size - 1, db - 1, -1):
        c = int(r[k]) * inv % p
        if c:
            q[k - db] = c
            r[k - db: k + 1] = (r[k - db: k + 1] - c * b) % p
    return _trim(q), _trim(r[:db])


def _gcd(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    a, b = _trim(a % p), _trim(b % p)
    while b.size:
        a, b = b, _divmod(a, b, p)[1]
    if a.size:
        a = a * pow(int(a[-1]), -1, p) % p
    return a


class _Reducer:
    """Reduction modulo a fixed monic f via a table of X^k mod f."""

    def __init__(self, f: np.ndarray, p: int):
        self.p = p
        self.f = f
        n = f.size - 1
        self.n = n
        rows = []
        cur = np.zeros(n, dtype=np.int64)
        if n:
            # X^n mod f = -(f_0 + ... + f_{n-1} X^{n-1})
            cur = (-f[:n]) % p
        for _ in range(max(1, n - 1)):
            rows.append(cur)
            # multiply by X and reduce
            top = int(cur[-1])
            nxt = np.zeros(n, dtype=np.int64)
            nxt[1:] = cur[:-1]
            nxt = (nxt - top * f[:n]) % p
            cur = nxt
        self.table = np.array(rows, dtype=np.int64).reshape(len(rows), n)

    def reduce(self, a: np.ndarray) -> np.ndarray:
        n, p = self.n, self.p
        if a.size <= n:
            out = np.zeros(n, dtype=np.int64)
            out[: a.size] = a
            return out
        high = a[n:]
        low = np.zeros(n, dtype=np.int64)
        low[: min(n, a.size)] = a[:n]
        return (low + high @ self.table[: high.size] % p) % p

    def mulmod(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.reduce(_mul(a, b, self.p))

    def powmod(self, a: np.ndarray, e: int) -> np.ndarray:
        result = self.reduce(np.array([1], dtype=np.int64))
        base = self.reduce(a)
        while e:
            if e & 1:
                result = self.mulmod(result, base)
            e >>= 1
            if e:
                base = self.mulmod(base, base)
        return result


def reduce_mod(a: UniPoly, prime: int) -> ModPoly:
    coeffs = []
    for c in a.coeffs:
        c = Fraction(c)
        if c.denominator % prime == 0:
            raise BadPrime("prime %d divides a coefficient denominator" % prime)
        coeffs.append(c.numerator * pow(c.denominator, -1, prime) % prime)
    return ModPoly(prime, coeffs)


def is_squarefree(a: ModPoly) -> bool:
    if a.degree < 1:
        return True
    g = _gcd(a.array(), a.derivative().array(), a.prime)
    return g.size == 1


def distinct_degree_factorization(a: ModPoly) -> list[tuple[int, ModPoly]]:
    """[(d, product of all monic irreducible factors of degree d)] for squarefree ``a``."""
    if a.degree < 1:
        return []
    if not is_squarefree(a):
        raise NotSquarefree("input is not squarefree mod %d" % a.prime)
    p = a.prime
    f = a.monic().array()
    n = f.size - 1
    red = _Reducer(f, p)
    x = np.array([0, 1], dtype=np.int64)
    xp = red.powmod(x, p)
    # Frobenius matrix: row i holds X^(i*p) mod f
    frob = np.zeros((n, n), dtype=np.int64)
    row = red.reduce(np.array([1], dtype=np.int64))
    for i in range(n):
        frob[i] = row
        row = red.mulmod(row, xp)
    g = f
    h = red.reduce(x)
    out = []
    d = 1
    while g.size - 1 >= 2 * d:
        h = h @ frob % p
        hx = h.copy()
        hx[1] = (hx[1] - 1) % p
        common = _gcd(g, hx, p)
        if common.size > 1:
            out.append((d, ModPoly._from_array(p, common)))
            g = _divmod(g, common, p)[0]
        d += 1
    if g.size > 1:
        out.append((g.size - 1, ModPoly._from_array(p, g)))
    return out


def equal_degree_split(a: ModPoly, d: int, rng: random.Random | None = None) -> list[ModPoly]:
    """Cantor-Zassenhaus splitting of a product of distinct degree-``d`` irreducibles (odd p)."""
    p = a.prime
    if p == 2:
        raise ValueError("equal-degree splitting here needs an odd prime")
    rng = rng or random.Random(0)
    a = a.monic()
    if a.degree == d:
        return [a]
    f = a.array()
    red = _Reducer(f, p)
    while True:
        r = np.array([rng.randrange(p) for _ in range(a.degree)], dtype=np.int64)
        w = red.powmod(r, (p ** d - 1) // 2)
        w[0] = (w[0] - 1) % p
        g = _gcd(f, w, p)
        if 0 < g.size - 1 < a.degree:
            left = ModPoly._from_array(p, g)
            right = ModPoly._from_array(p, _divmod(f, g, p)[0])
            return equal_degree_split(left, d, rng) + equal_degree_split(right, d, rng)


def factor(a: ModPoly) -> list[ModPoly]:
    """Monic irreducible factors of a squarefree polynomial."""
    out = []
    for d, part in distinct_degree_factorization(a):
        out.extend(equal_degree_split(part, d))
    return sorted(out, key=lambda m: (m.degree, m.coeffs))


def factor_degree_pattern(a: ModPoly) -> list[int]:
    """Sorted degrees of the irreducible factors (squarefree input)."""
    degrees = []
    for d, part in distinct_degree_factorization(a):
        degrees += [d] * (part.degree // d)
    return sorted(degrees)


def refines(pattern: Sequence[int], target: Sequence[int]) -> bool:
    """Whether ``pattern`` splits into groups whose sums are exactly ``target``."""
    if sum(pattern) != sum(target):
        return False
    items = sorted(pattern, reverse=True)

    @lru_cache(maxsize=None)
    def place(i: int, caps: tuple[int, ...]) -> bool:
        if i == len(items):
            return all(c == 0 for c in caps)
        seen = set()
        for k, c in enumerate(caps):
            if c >= items[i] and c not in seen:
                seen.add(c)
                nxt = list(caps)
                nxt[k] -= items[i]
                if place(i + 1, tuple(sorted(nxt))):
                    return True
        return False

    return place(0, tuple(sorted(target)))


def subset_sums(pattern: Sequence[int]) -> set[int]:
    sums = {0}
    for d in pattern:
        sums |= {s + d for s in sums}
    return sums


def _integer_form(a: UniPoly) -> list[int]:
    return a.integer_form()[1]


def admissible(a: UniPoly, prime: int) -> ModPoly | None:
    """a mod prime if degree is preserved and the reduction is squarefree, else None."""
    ints = _integer_form(a)
    if ints[-1] % prime == 0:
        return None
    m = ModPoly(prime, ints)
    return m if is_squarefree(m) else None


def irreducibility_certificate(a: UniPoly, prime_budget: int = 200) -> int | None:
    """A prime modulo which ``a`` stays of full degree and is irreducible, or None.

    None means only "no certificate found"; it never claims reducibility.
    """
    if a.degree < 1:
        raise ValueError("constant polynomial")
    for p in mod.small_primes(prime_budget):
        m = admissible(a, p)
        if m is not None and factor_degree_pattern(m) == [a.degree]:
            return p
    return None


@dataclass(frozen=True)
class IrreducibilityCertificate:
    degree: int
    kind: str  # "single-prime", "degree-sets" or "none"
    patterns: tuple[tuple[int, tuple[int, ...]], ...]

    @property
    def proves_irreducible(self) -> bool:
        return self.kind in ("single-prime", "degree-sets")

    def to_dict(self) -> dict:
        return {"degree": self.degree, "kind": self.kind,
                "patterns": {str(p): list(pat) for p, pat in self.patterns}}


def certify_irreducible(a: UniPoly, prime_budget: int = 200) -> IrreducibilityCertificate:
    """Single-prime certificate if one exists in budget, else degree-set intersection.

    A factor over Q of degree k forces k to be a subset sum of every modular
    degree pattern; if no 0 < k < n survives all patterns, ``a`` is irreducible.
    """
    n = a.degree
    possible = set(range(1, n))
    patterns = []
    for p in mod.small_primes(prime_budget):
        m = admissible(a, p)
        if m is None:
            continue
        pat = factor_degree_pattern(m)
        patterns.append((p, tuple(pat)))
        if pat == [n]:
            return IrreducibilityCertificate(n, "single-prime", ((p, tuple(pat)),))
        possible &= subset_sums(pat)
        if not possible:
            return IrreducibilityCertificate(n, "degree-sets", tuple(patterns))
    return IrreducibilityCertificate(n, "none", tuple(patterns))

"""Prime-field kernels shared by the exact and modular polynomial modules.

Polynomials are coefficient lists, lowest degree first.  Scalar kernels work
for any prime; the batched numpy resultant needs primes below 2**31 so that
products of two residues fit in int64.
"""

from __future__ import annotations

from functools import lru_cache

import gmpy2
import numpy as np

LARGE_PRIME_START = 1 << 30


@lru_cache(maxsize=None)
def _large_primes(count: int) -> tuple[int, ...]:
    out = []
    p = LARGE_PRIME_START
    while len(out) < count:
        p = int(gmpy2.next_prime(p))
        out.append(p)
    return tuple(out)


def large_primes(count: int) -> tuple[int, ...]:
    """The first ``count`` primes above 2**30 (all below 2**31)."""
    size = 64
    while size < count:
        size *= 2
    return _large_primes(size)[:count]


def small_primes(count: int, start: int = 2) -> list[int]:
    out = []
    p = start - 1
    while len(out) < count:
        p = int(gmpy2.next_prime(p))
        out.append(p)
    return out


def crt(residues, moduli) -> tuple[int, int]:
    """Combine residues into the unique value mod the product (nonnegative)."""
    modulus = 1
    for m in moduli:
        modulus *= m
    total = 0
    for r, m in zip(residues, moduli):
        partial = modulus // m
        total += int(r) * partial * pow(partial % m, -1, m)
    return total % modulus, modulus


def symmetric(value: int, modulus: int) -> int:
    return value - modulus if value > modulus // 2 else value


def strip(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def reduce(a, p) -> list[int]:
    return strip([c % p for c in a])


def monic(a: list[int], p: int) -> list[int]:
    if not a:
        return a
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def divmod_mod(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    q = [0] * max(0, len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k] * inv % p
        if c:
            q[k - db] = c
            off = k - db
            for j in range(db + 1):
                a[off + j] = (a[off + j] - c * b[j]) % p
    return strip(q), strip(a[:db])


def gcd_mod(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = reduce(a, p), reduce(b, p)
    while b:
        a, b = b, divmod_mod(a, b, p)[1]
    return monic(a, p)


def derivative_mod(a: list[int], p: int) -> list[int]:
    return strip([(i * c) % p for i, c in enumerate(a)][1:])


def resultant_mod(a: list[int], b: list[int], p: int) -> int:
    """res(a, b) over F_p by the Euclidean algorithm; inputs must keep their degree mod p."""
    a, b = reduce(a, p), reduce(b, p)
    if not a or not b:
        return 0
    result = 1
    while True:
        m, n = len(a) - 1, len(b) - 1
        if n == 0:
            return result * pow(b[0], m, p) % p
        r = divmod_mod(a, b, p)[1]
        if not r:
            return 0
        k = len(r) - 1
        if (m * n) % 2:
            result = -result
        result = result * pow(b[-1], m - k, p) % p
        a, b = b, r


def _powmod_vec(base: np.ndarray, exps: np.ndarray, mods: np.ndarray) -> np.ndarray:
    result = np.ones_like(base)
    base = base % mods
    exps = exps.copy()
    while np.any(exps):
        odd = (exps & 1).astype(bool)
        result = np.where(odd, result * base % mods, result)
        base = base * base % mods
        exps >>= 1
    return result


def resultant_batch(a: list[int], b: list[int], primes) -> list[int]:
    """res(a, b) modulo every prime in ``primes`` (each below 2**31).

    Runs one Euclidean remainder sequence for all primes at once, assuming the
    generic degree drop of one per step.  Primes where a remainder loses more
    than one degree fall back to the scalar kernel.
    """
    primes = list(primes)
    mods = np.array(primes, dtype=np.int64)[:, None]
    A = np.array([[c % p for c in a] for p in primes], dtype=np.int64)
    B = np.array([[c % p for c in b] for p in primes], dtype=np.int64)
    regular = (A[:, -1] != 0) & (B[:, -1] != 0)
    if len(a) != len(b) + 1:
        return [resultant_mod(a, b, p) for p in primes]
    result = np.ones(len(primes), dtype=np.int64)
    m1 = mods[:, 0]
    while True:
        m, n = A.shape[1] - 1, B.shape[1] - 1
        if n == 0:
            result = result * _powmod_vec(B[:, 0], np.full(len(primes), m, dtype=np.int64), m1) % m1
            break
        binv = _powmod_vec(B[:, -1], m1 - 2, m1)
        R = A.copy()
        # two elimination steps: deg m = n + 1
        c = R[:, -1] * binv % m1
        R[:, 1:] = (R[:, 1:] - (c[:, None] * B) % mods) % mods
        c = R[:, -2] * binv % m1
        R[:, :-1] = (R[:, :-1] - (c[:, None] * B) % mods) % mods
        R = R[:, :n]
        regular &= R[:, -1] != 0
        if (m * n) % 2:
            result = (-result) % m1
        # generic case: deg r = n - 1, so lc(b)^(m - k) = lc(b)^2
        result = result * (B[:, -1] * B[:, -1] % m1) % m1
        A, B = B, R
        if not regular.any():
            break
    out = []
    for i, p in enumerate(primes):
        out.append(int(result[i]) if regular[i] else resultant_mod(a, b, p))
    return out

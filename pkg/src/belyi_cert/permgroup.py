"""Permutations on {1..n} and stabilizer-chain group certificates.

Composition convention: ``compose(a, b)`` applies ``a`` first, then ``b``
(right action, as in GAP/Magma).  Products of cycle listings read left to
right therefore match the usual computer-algebra reading of ``x*y*z``.

Points are 1-based in every public function.  Internally the stabilizer
chain works on 0-based image tuples for speed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence


@dataclass(frozen=True)
class Permutation:
    """A bijection of {1..degree}; ``images[i - 1]`` is the image of ``i``."""

    images: tuple[int, ...]

    def __post_init__(self):
        n = len(self.images)
        if n == 0:
            raise ValueError("permutation must have positive degree")
        if sorted(self.images) != list(range(1, n + 1)):
            raise ValueError("images do not form a bijection of 1..%d" % n)

    @property
    def degree(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(tuple(range(1, degree + 1)))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], degree: int) -> "Permutation":
        img = list(range(1, degree + 1))
        seen = set()
        for cyc in cycles:
            for k, pt in enumerate(cyc):
                if not 1 <= pt <= degree:
                    raise ValueError("point %d out of range 1..%d" % (pt, degree))
                if pt in seen:
                    raise ValueError("repeated point %d" % pt)
                seen.add(pt)
                img[pt - 1] = cyc[(k + 1) % len(cyc)]
        return cls(tuple(img))

    @classmethod
    def _from_zero_based(cls, img: Sequence[int]) -> "Permutation":
        return cls(tuple(i + 1 for i in img))

    def _zero_based(self) -> tuple[int, ...]:
        return tuple(i - 1 for i in self.images)

    def __call__(self, point: int) -> int:
        return self.images[point - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def __pow__(self, k: int) -> "Permutation":
        result = Permutation.identity(self.degree)
        base = self if k >= 0 else inverse(self)
        for _ in range(abs(k)):
            result = compose(result, base)
        return result

    def is_identity(self) -> bool:
        return all(img == i for i, img in enumerate(self.images, 1))

    def cycles(self, include_fixed: bool = False) -> list[tuple[int, ...]]:
        """Disjoint cycles, each starting at its smallest point, ordered by that point."""
        seen = [False] * (self.degree + 1)
        out = []
        for start in range(1, self.degree + 1):
            if seen[start]:
                continue
            cyc = [start]
            seen[start] = True
            nxt = self.images[start - 1]
            while nxt != start:
                cyc.append(nxt)
                seen[nxt] = True
                nxt = self.images[nxt - 1]
            if len(cyc) > 1 or include_fixed:
                out.append(tuple(cyc))
        return out

    def moved_points(self) -> list[int]:
        return [i for i, img in enumerate(self.images, 1) if img != i]

    def __str__(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + ", ".join(map(str, c)) + ")" for c in cyc)


@dataclass(frozen=True)
class CycleType:
    """Multiset of cycle lengths, stored as (length, count) pairs, longest first.

    Fixed points are kept as length-1 cycles so the lengths always sum to the degree.
    """

    parts: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for length, count in self.parts:
            if length < 1 or count < 1:
                raise ValueError("cycle lengths and counts must be positive")
        lengths = [length for length, _ in self.parts]
        if lengths != sorted(set(lengths), reverse=True):
            raise ValueError("parts must be sorted by decreasing length, without repeats")

    @classmethod
    def from_lengths(cls, lengths: Iterable[int]) -> "CycleType":
        counts: dict[int, int] = {}
        for length in lengths:
            counts[length] = counts.get(length, 0) + 1
        return cls(tuple(sorted(counts.items(), reverse=True)))

    @classmethod
    def parse(cls, text: str) -> "CycleType":
        """Parse the exponent notation ``6^10.3^10.2^5`` (``·`` also accepted)."""
        counts: dict[int, int] = {}
        for chunk in text.replace("·", ".").replace(" ", "").split("."):
            if not chunk:
                raise ValueError("empty part in cycle type %r" % text)
            length, _, count = chunk.partition("^")
            c = int(count) if count else 1
            counts[int(length)] = counts.get(int(length), 0) + c
        return cls(tuple(sorted(counts.items(), reverse=True)))

    @property
    def degree(self) -> int:
        return sum(length * count for length, count in self.parts)

    @property
    def num_cycles(self) -> int:
        return sum(count for _, count in self.parts)

    def lengths(self) -> list[int]:
        return [length for length, count in self.parts for _ in range(count)]

    def __str__(self) -> str:
        return ".".join("%d^%d" % part for part in self.parts)


def compose(a: Permutation, b: Permutation) -> Permutation:
    """Apply ``a`` first, then ``b``."""
    if a.degree != b.degree:
        raise ValueError("degree mismatch: %d vs %d" % (a.degree, b.degree))
    bi = b.images
    return Permutation(tuple(bi[i - 1] for i in a.images))


def inverse(a: Permutation) -> Permutation:
    inv = [0] * a.degree
    for i, img in enumerate(a.images, 1):
        inv[img - 1] = i
    return Permutation(tuple(inv))


def conjugate(a: Permutation, g: Permutation) -> Permutation:
    """g^-1 a g."""
    return compose(compose(inverse(g), a), g)


def cycle_type(a: Permutation) -> CycleType:
    return CycleType.from_lengths(len(c) for c in a.cycles(include_fixed=True))


def sign(a: Permutation) -> int:
    return -1 if (a.degree - len(a.cycles(include_fixed=True))) % 2 else 1


def orbit(generators: Sequence[Permutation], point: int) -> frozenset[int]:
    seen = {point}
    stack = [point]
    while stack:
        pt = stack.pop()
        for g in generators:
            img = g.images[pt - 1]
            if img not in seen:
                seen.add(img)
                stack.append(img)
    return frozenset(seen)


def orbits(generators: Sequence[Permutation], degree: int) -> list[frozenset[int]]:
    out = []
    covered: set[int] = set()
    for pt in range(1, degree + 1):
        if pt not in covered:
            orb = orbit(generators, pt)
            covered |= orb
            out.append(orb)
    return out


def is_transitive(generators: Sequence[Permutation]) -> bool:
    return len(orbit(generators, 1)) == generators[0].degree


# --- stabilizer chain (0-based tuples internally) -------------------------

def _mul(a, b):
    return tuple(b[i] for i in a)


def _inv(a):
    inv = [0] * len(a)
    for i, img in enumerate(a):
        inv[img] = i
    return tuple(inv)


@dataclass
class _Level:
    base: int
    gens: list
    transversal: dict = field(default_factory=dict)

    def rebuild(self, n):
        ident = tuple(range(n))
        trans = {self.base: ident}
        queue = [self.base]
        for pt in queue:
            u = trans[pt]
            for s in self.gens:
                img = s[pt]
                if img not in trans:
                    trans[img] = _mul(u, s)
                    queue.append(img)
        self.transversal = trans


@dataclass(frozen=True)
class StabilizerChain:
    """Base and strong generating set of a permutation group.

    ``level_generators[i]`` generates the pointwise stabilizer of the first
    ``i`` base points; ``orbit_sizes[i]`` is the size of the orbit of
    ``base_points[i]`` under it.
    """

    degree: int
    base_points: tuple[int, ...]
    level_generators: tuple[tuple[Permutation, ...], ...]
    orbit_sizes: tuple[int, ...]

    @property
    def strong_generators(self) -> tuple[Permutation, ...]:
        return self.level_generators[0] if self.level_generators else ()

    def order(self) -> int:
        out = 1
        for size in self.orbit_sizes:
            out *= size
        return out

    def stabilizer_generators(self, depth: int = 1) -> tuple[Permutation, ...]:
        """Generators of the pointwise stabilizer of the first ``depth`` base points."""
        if depth < len(self.level_generators):
            return self.level_generators[depth]
        return ()

    def contains(self, g: Permutation) -> bool:
        levels = _levels_from_chain(self)
        residue, _ = _sift(levels, g._zero_based())
        return residue is None


def _sift(levels, g):
    n = len(g)
    for depth, lvl in enumerate(levels):
        pt = g[lvl.base]
        u = lvl.transversal.get(pt)
        if u is None:
            return g, depth
        g = _mul(g, _inv(u))
    if g == tuple(range(n)):
        return None, len(levels)
    return g, len(levels)


def _levels_from_chain(chain: StabilizerChain):
    levels = []
    for b, gens in zip(chain.base_points, chain.level_generators):
        lvl = _Level(b - 1, [g._zero_based() for g in gens])
        lvl.rebuild(chain.degree)
        levels.append(lvl)
    return levels


class OrderLimitExceeded(ArithmeticError):
    """The group is provably larger than the requested limit."""

    def __init__(self, lower_bound: int, limit: int):
        super().__init__("group order exceeds %d (at least %d)" % (limit, lower_bound))
        self.lower_bound = lower_bound
        self.limit = limit


def _check_limit(levels, limit):
    # each level's group sits inside the stabilizer of the level above,
    # so the product of orbit lengths of a partial chain bounds |G| from below
    if limit is None:
        return
    bound = 1
    for lvl in levels:
        bound *= len(lvl.transversal)
    if bound > limit:
        raise OrderLimitExceeded(bound, limit)


def _add_strong_generator(levels, h, depth, n):
    if depth == len(levels):
        moved = next(i for i in range(n) if h[i] != i)
        levels.append(_Level(moved, []))
    for j in range(depth + 1):
        levels[j].gens.append(h)
    for j in range(depth + 1):
        levels[j].rebuild(n)


def _random_schreier_sims(levels, gens, n, rng, patience, limit=None):
    # product replacement random elements
    pool = list(gens) * max(1, 10 // max(1, len(gens)))
    pool = pool + list(gens)
    acc = tuple(range(n))
    for _ in range(50):
        i, j = rng.sample(range(len(pool)), 2) if len(pool) > 1 else (0, 0)
        pool[i] = _mul(pool[i], pool[j])
        acc = _mul(acc, pool[i])
    quiet = 0
    while quiet < patience:
        i, j = rng.sample(range(len(pool)), 2) if len(pool) > 1 else (0, 0)
        pool[i] = _mul(pool[i], pool[j])
        acc = _mul(acc, pool[i])
        residue, depth = _sift(levels, acc)
        if residue is None:
            quiet += 1
        else:
            quiet = 0
            _add_strong_generator(levels, residue, depth, n)
            _check_limit(levels, limit)


def _verify_schreier(levels, n):
    """Deterministic check: every Schreier generator sifts to identity below its level.

    Returns True if the chain was already complete; otherwise patches it and
    returns False so the caller re-runs the check.
    """
    for depth in range(len(levels) - 1, -1, -1):
        lvl = levels[depth]
        below = levels[depth + 1:]
        trans = lvl.transversal
        for pt, u in trans.items():
            for s in lvl.gens:
                img = s[pt]
                sg = _mul(_mul(u, s), _inv(trans[img]))
                residue, d = _sift(below, sg)
                if residue is not None:
                    _add_strong_generator(levels, residue, depth + 1 + d, n)
                    return False
    return True


def build_chain(generators: Sequence[Permutation], base: Sequence[int] = (),
                seed: int | None = 0, patience: int = 40,
                order_limit: int | None = None) -> StabilizerChain:
    """Randomized Schreier-Sims followed by a deterministic Schreier-generator check.

    ``base`` optionally prescribes a prefix of base points (1-based).  The
    random phase only affects speed: the final verification makes the chain
    exact regardless of ``seed``.  With ``order_limit`` set, raises
    OrderLimitExceeded as soon as the group is known to be larger.
    """
    if not generators:
        raise ValueError("need at least one generator")
    n = generators[0].degree
    if any(g.degree != n for g in generators):
        raise ValueError("generators have different degrees")
    ident = tuple(range(n))
    gens = [g._zero_based() for g in generators if not g.is_identity()]
    levels = [_Level(b - 1, []) for b in base]
    if gens and not levels:
        moved = next(i for i in range(n) if gens[0][i] != i)
        levels.append(_Level(moved, []))
    for lvl in levels:
        lvl.gens = []
    if levels:
        # every original generator lives at the top level; push down where it fixes base points
        for g in gens:
            depth = 0
            while depth < len(levels) and g[levels[depth].base] == levels[depth].base:
                depth += 1
            if depth == len(levels):
                _add_strong_generator(levels, g, depth, n)
            else:
                for j in range(depth + 1):
                    levels[j].gens.append(g)
        for lvl in levels:
            lvl.rebuild(n)
    if gens:
        _random_schreier_sims(levels, gens, n, random.Random(seed), patience, order_limit)
        while not _verify_schreier(levels, n):
            _check_limit(levels, order_limit)
        _check_limit(levels, order_limit)
    # drop redundant trailing levels with trivial orbit
    while levels and len(levels[-1].transversal) == 1 and not levels[-1].gens:
        levels.pop()
    return StabilizerChain(
        degree=n,
        base_points=tuple(lvl.base + 1 for lvl in levels),
        level_generators=tuple(
            tuple(Permutation._from_zero_based(g) for g in lvl.gens if g != ident)
            for lvl in levels),
        orbit_sizes=tuple(len(lvl.transversal) for lvl in levels),
    )


def group_order(generators: Sequence[Permutation], seed: int | None = 0) -> int:
    return build_chain(generators, seed=seed).order()


def point_stabilizer_orbits(chain: StabilizerChain, point: int) -> list[frozenset[int]]:
    if not chain.base_points or chain.base_points[0] != point:
        chain = build_chain(chain.strong_generators or [Permutation.identity(chain.degree)],
                            base=[point])
    stab = chain.stabilizer_generators(1)
    if not stab:
        return [frozenset([i]) for i in range(1, chain.degree + 1)]
    return orbits(stab, chain.degree)


def subdegrees(chain: StabilizerChain, point: int) -> list[int]:
    """Sorted orbit sizes of the stabilizer of ``point`` (transitive groups only)."""
    gens = chain.strong_generators
    if not gens or len(orbit(gens, point)) != chain.degree:
        raise ValueError("group is not transitive; subdegrees undefined")
    return sorted(len(o) for o in point_stabilizer_orbits(chain, point))


def _minimal_block(gens, n, a, b):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    parent[find(b)] = find(a)
    queue = [(a, b)]
    while queue:
        alpha, beta = queue.pop()
        for g in gens:
            ra, rb = find(g[alpha]), find(g[beta])
            if ra != rb:
                parent[rb] = ra
                queue.append((ra, rb))
    classes: dict[int, list[int]] = {}
    for x in range(n):
        classes.setdefault(find(x), []).append(x + 1)
    return tuple(sorted((frozenset(c) for c in classes.values()), key=min))


def minimal_block_systems(generators: Sequence[Permutation]) -> list[tuple[frozenset[int], ...]]:
    """All minimal nontrivial block systems of a transitive group.

    An empty list certifies primitivity.  For each k the smallest block
    containing {1, k} is found by union-find; the minimal systems are those
    whose block through 1 contains no smaller nontrivial block through 1.
    """
    n = generators[0].degree
    if not is_transitive(generators):
        raise ValueError("block systems are only defined here for transitive groups")
    gens = [g._zero_based() for g in generators]
    found = {}
    for k in range(1, n):
        system = _minimal_block(gens, n, 0, k)
        if len(system) > 1:
            found[system] = next(b for b in system if 1 in b)
    minimal = []
    for system, block in found.items():
        if not any(other < block for other in found.values()):
            minimal.append(system)
    return sorted(minimal, key=lambda s: sorted(next(b for b in s if 1 in b)))


def candidate_block_sizes(subdegs: Sequence[int], degree: int) -> dict[int, bool]:
    """Sizes a block through a point could have, given the subdegrees.

    A block through w is invariant under the stabilizer of w, so it is {w}
    plus a nonempty union of nontrivial suborbits (and not everything).  Maps
    each such size to whether it divides ``degree``.
    """
    rest = sorted(subdegs)[1:]
    sums = {0}
    for s in rest:
        sums |= {x + s for x in sums}
    sizes = sorted(1 + s for s in sums if 0 < s < sum(rest))
    return {size: degree % size == 0 for size in sizes}

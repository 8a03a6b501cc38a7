"""The dessin d'enfant f^-1([0, 1]) from tracked fibers.

Edges are the strands of the fiber over the segment (0, 1), labeled like the
base fiber at t = 1/2 (so labels agree with the monodromy module).  A strand
ends at a black vertex (root of p) as t -> 0 and at a white vertex (root of
p - q, or infinity when deg(p - q) < N) as t -> 1.  Around a vertex of
valence e the strands leave in e directions; sorting them counterclockwise
gives the rotation system, and "next edge counterclockwise" around black and
white vertices is exactly the monodromy around 0 and around 1.
"""

from __future__ import annotations

import html
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .monodromy import (DEFAULT_PRECISION, Backend, RationalMap, TrackerConfig, aberth,
                        basepoint_fiber, real_segment, track)
from .permgroup import Permutation, compose, inverse
from .qpoly import FactoredPoly, UniPoly, squarefree_decomposition


class DessinError(RuntimeError):
    pass


@dataclass
class Vertex:
    color: str                     # "black" or "white"
    position: complex | None       # None for the vertex at infinity
    valence: int
    edges: tuple[int, ...] = ()    # counterclockwise, 1-based edge labels

    @property
    def at_infinity(self) -> bool:
        return self.position is None

    def to_dict(self) -> dict:
        pos = None if self.position is None else [self.position.real, self.position.imag]
        return {"color": self.color, "position": pos, "valence": self.valence,
                "edges": list(self.edges)}


@dataclass
class DessinGraph:
    degree: int
    black: list[Vertex]
    white: list[Vertex]
    poles: list[tuple[complex | None, int]] = field(default_factory=list)
    paths: dict[int, np.ndarray] = field(default_factory=dict, repr=False)
    epsilon: tuple[float, float] = (0.0, 0.0)

    @property
    def num_edges(self) -> int:
        return sum(v.valence for v in self.black)

    def faces(self) -> int:
        s0, s1 = dessin_permutations(self)
        return len(inverse(compose(s0, s1)).cycles(include_fixed=True))

    def euler_characteristic(self) -> int:
        return len(self.black) + len(self.white) - self.num_edges + self.faces()

    def counts(self) -> dict:
        return {"black": len(self.black), "white": len(self.white), "edges": self.num_edges,
                "faces": self.faces(), "poles": len(self.poles),
                "euler": self.euler_characteristic()}

    def to_dict(self) -> dict:
        s0, s1 = dessin_permutations(self)
        return {"degree": self.degree, "counts": self.counts(),
                "black": [v.to_dict() for v in self.black],
                "white": [v.to_dict() for v in self.white],
                "poles": [{"position": None if z is None else [z.real, z.imag], "order": m}
                          for z, m in self.poles],
                "sigma0": str(s0), "sigma1": str(s1), "epsilon": list(self.epsilon)}


@dataclass(frozen=True)
class DessinConfig:
    epsilon: float = 1e-3
    min_epsilon: float = 1e-14
    shrink: float = 1e-2
    cluster_fraction: float = 1 / 3  # cluster radius as a fraction of vertex separation
    precision: int = DEFAULT_PRECISION
    base_point: Fraction = Fraction(1, 2)


def _roots_of(base: UniPoly) -> np.ndarray:
    if base.degree == 1:
        return np.array([complex(-base[0] / base[1])])
    return Backend.to_complex(aberth(list(base.coeffs), 106))


def _vertex_sites(f: FactoredPoly | list, color: str) -> list[Vertex]:
    out = []
    for base, e in f:
        # a base need not be squarefree when the map was given unfactored
        for m, part in squarefree_decomposition(base):
            if part.degree > 0:
                out += [Vertex(color, complex(z), e * m) for z in _roots_of(part)]
    return out


def _separation(points: np.ndarray) -> np.ndarray:
    if len(points) < 2:
        return np.full(len(points), np.inf)
    d = np.abs(points[:, None] - points[None, :])
    np.fill_diagonal(d, np.inf)
    return d.min(axis=1)


def _assign(ends: np.ndarray, verts: list[Vertex], frac: float, infinity_valence: int):
    """Map each strand end to a vertex index (len(verts) stands for infinity), or None."""
    finite = np.array([v.position for v in verts], dtype=complex)
    radius = _separation(finite) * frac
    big = 2 * float(np.abs(finite).max()) + 1 if len(finite) else 1.0
    out = [-1] * len(ends)
    if infinity_valence:
        far = np.argsort(-np.abs(ends))[:infinity_valence]
        if not np.all(np.abs(ends[far]) > big):
            return None
        for i in far:
            out[int(i)] = len(verts)
    dist = np.abs(ends[:, None] - finite[None, :])
    for i in range(len(ends)):
        if out[i] >= 0:
            continue
        j = int(np.argmin(dist[i]))
        if dist[i, j] > radius[j]:
            return None
        out[i] = j
    counts = np.bincount(out, minlength=len(verts) + 1)
    want = [v.valence for v in verts] + [infinity_valence]
    if list(counts) != want:
        return None
    return out


def _rotation(ends: np.ndarray, owner: list[int], verts: list[Vertex]) -> None:
    for j, v in enumerate(verts):
        idx = [i for i, o in enumerate(owner) if o == j]
        if v.position is None:
            angles = [np.angle(1 / ends[i]) for i in idx]
        else:
            angles = [np.angle(ends[i] - v.position) for i in idx]
        v.edges = tuple(i + 1 for _, i in sorted(zip(angles, idx)))


def _track_to_end(fmap, fiber, target: float, cfg: DessinConfig, verts, inf_valence, config):
    """Track toward ``target`` (0 or 1), shrinking epsilon until strands cluster onto vertices."""
    eps = cfg.epsilon
    sign = 1 if target == 0 else -1
    here = float(fiber.parameter.real)
    samples = []
    while True:
        goal = target + sign * eps
        end, stats = track(fmap, fiber, real_segment(here, goal), config)
        samples += stats.samples
        fiber, here = end, goal
        ends = end.complex_roots()
        owner = _assign(ends, verts, cfg.cluster_fraction, inf_valence)
        if owner is not None:
            return ends, owner, samples, eps
        eps *= cfg.shrink
        if eps < cfg.min_epsilon:
            raise DessinError("strands did not cluster onto vertices down to epsilon %.1e" % eps)


def compute_dessin(p, q=None, cfg: DessinConfig = DessinConfig()) -> DessinGraph:
    """Build the dessin of f = p/q by tracking the fiber from the base point toward 0 and 1."""
    spec = p if q is None else None
    if spec is not None:
        p, q = spec.p, spec.q
    fmap = RationalMap(p, q)
    n = fmap.degree
    P, Q = fmap.P, fmap.Q
    R = P - Q
    black = _vertex_sites(fmap.p.factors, "black")
    white = _vertex_sites([(part, m) for m, part in squarefree_decomposition(R)], "white")
    inf_black = n - P.degree
    inf_white = n - R.degree if P.degree == n and Q.degree == n else 0
    base = basepoint_fiber(fmap, None, cfg.base_point, cfg.precision)
    tcfg = TrackerConfig(record=True)
    ends0, own0, path0, eps0 = _track_to_end(fmap, base, 0, cfg, black, inf_black, tcfg)
    ends1, own1, path1, eps1 = _track_to_end(fmap, base, 1, cfg, white, inf_white, tcfg)
    if inf_black:
        black.append(Vertex("black", None, inf_black))
    if inf_white:
        white.append(Vertex("white", None, inf_white))
    _rotation(ends0, own0, black)
    _rotation(ends1, own1, white)
    poles = [(complex(z), e) for base_, e in fmap.q.factors for z in _roots_of(base_)]
    if Q.degree < n:
        poles.append((None, n - Q.degree))
    paths = {}
    for i in range(n):
        left = [xs[i] for _, xs in reversed(path0)]
        right = [xs[i] for _, xs in path1]
        paths[i + 1] = np.array(left + right, dtype=complex)
    return DessinGraph(n, black, white, poles, paths, (eps0, eps1))


def dessin_permutations(g: DessinGraph) -> tuple[Permutation, Permutation]:
    """Next-edge-counterclockwise around black vertices and around white vertices."""
    def rot(verts):
        cycles = [v.edges for v in verts if len(v.edges) > 1]
        return Permutation.from_cycles(cycles, g.degree)
    return rot(g.black), rot(g.white)


# --- rendering -----------------------------------------------------------

def _squash(z: complex, scale: float) -> complex:
    """Radial compression of the plane into the unit disk; infinity goes to the boundary."""
    r = abs(z)
    return z / (r + scale) if r else 0j


def render(g: DessinGraph, output, size: int = 800) -> Path:
    """Write an SVG drawing and a JSON sidecar (same stem, .json) and return the SVG path."""
    if g.num_edges == 0 or not (g.black or g.white):
        raise DessinError("cannot render an empty dessin")
    output = Path(output)
    finite = [abs(v.position) for v in g.black + g.white if v.position is not None]
    scale = float(np.median(finite)) if finite else 1.0
    scale = scale or 1.0
    half = size / 2
    rad = half * 0.92

    def xy(w: complex) -> tuple[float, float]:
        return half + rad * w.real, half - rad * w.imag

    def place(z: complex | None, toward: complex = 1) -> tuple[float, float]:
        if z is None:
            return xy(toward / abs(toward) if toward else 1)
        return xy(_squash(z, scale))

    out = ['<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" viewBox="0 0 %d %d">'
           % (size, size, size, size),
           '<rect width="100%" height="100%" fill="white"/>',
           '<circle class="boundary" cx="%.2f" cy="%.2f" r="%.2f" fill="none" stroke="#bbb"/>'
           % (half, half, rad)]
    for label in sorted(g.paths):
        pts = g.paths[label]
        pts = pts[np.isfinite(pts)]
        coords = " ".join("%.2f,%.2f" % xy(_squash(complex(z), scale)) for z in pts)
        out.append('<polyline class="edge" data-edge="%d" points="%s" fill="none" '
                   'stroke="#444" stroke-width="1"/>' % (label, coords))
    for v in g.black:
        toward = g.paths[v.edges[0]][0] if v.at_infinity and v.edges else 1
        cx, cy = place(v.position, toward)
        out.append('<circle class="black" cx="%.2f" cy="%.2f" r="4" fill="black"/>' % (cx, cy))
    for v in g.white:
        toward = g.paths[v.edges[0]][-1] if v.at_infinity and v.edges else 1
        cx, cy = place(v.position, toward)
        out.append('<circle class="white" cx="%.2f" cy="%.2f" r="4" fill="white" stroke="black"/>'
                   % (cx, cy))
    for z, m in g.poles:
        cx, cy = place(z)
        out.append('<text class="pole" x="%.2f" y="%.2f" font-size="12" text-anchor="middle" '
                   'dominant-baseline="central" fill="#b00">%s</text>' % (cx, cy, html.escape("×")))
    out.append("</svg>")
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text("\n".join(out) + "\n", encoding="utf-8")
    output.with_suffix(".json").write_text(json.dumps(g.to_dict(), indent=2, sort_keys=True) + "\n")
    return output

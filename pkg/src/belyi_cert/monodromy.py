"""Numerical monodromy of f = p/q by continuation of the fiber p(x) - t*q(x) = 0.

Roots live in numpy arrays: complex128 at 53 bits, otherwise object arrays of
``gmpy2.mpc`` evaluated inside a gmpy2 context of the working precision.  The
map is evaluated from its factored form, which stays well conditioned where
the expanded degree-100 polynomial would not.

Conventions.  Base point 1/2.  The loop around 0 runs along the real axis to
1/4 and once counterclockwise around the circle |t| = 1/4; the loop around 1
mirrors it through 3/4.  The loop around infinity climbs vertically to the
circle |t| = 3 and runs once clockwise around it.  The permutation of a loop
sends strand i to the label of the base root where it ends; loops compose
left to right, and sigma0 * sigma1 * sigmaInf = 1 is checked, not assumed.
"""

from __future__ import annotations

import cmath
import contextlib
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import gmpy2
import numpy as np

from .permgroup import Permutation, compose
from .qpoly import FactoredPoly, UniPoly, expand

log = logging.getLogger(__name__)

DEFAULT_PRECISION = 212
MAX_PRECISION = 1024


class TrackingError(RuntimeError):
    pass


class NonConvergence(RuntimeError):
    pass


class RamifiedFiber(ValueError):
    pass


# --- numeric backend ------------------------------------------------------

class Backend:
    """complex128 at 53 bits, gmpy2.mpc object arrays above."""

    def __init__(self, precision: int):
        self.precision = int(precision)
        self.exact = self.precision > 53

    @contextlib.contextmanager
    def active(self):
        if self.exact:
            with gmpy2.context(gmpy2.get_context(), precision=self.precision):
                yield
        else:
            yield

    def scalar(self, v):
        if not self.exact:
            return complex(v)
        if isinstance(v, Fraction):
            return gmpy2.mpc(gmpy2.mpq(v.numerator, v.denominator))
        if isinstance(v, int):
            return gmpy2.mpc(v)
        if isinstance(v, (complex, float)):
            v = complex(v)
            return gmpy2.mpc(gmpy2.mpfr(v.real), gmpy2.mpfr(v.imag))
        return gmpy2.mpc(v)

    def array(self, values) -> np.ndarray:
        if not self.exact:
            return np.array([complex(v) for v in values], dtype=complex)
        out = np.empty(len(values), dtype=object)
        for i, v in enumerate(values):
            out[i] = self.scalar(v)
        return out

    def zeros(self, n: int) -> np.ndarray:
        return self.array([0] * n)

    def expi(self, angle):
        if not self.exact:
            return cmath.exp(1j * angle)
        return gmpy2.exp(gmpy2.mpc(0, angle))

    def pi(self):
        return math.pi if not self.exact else gmpy2.const_pi()

    def sqrt(self, v):
        return math.sqrt(v) if not self.exact else gmpy2.sqrt(gmpy2.mpfr(v))

    @staticmethod
    def to_complex(arr) -> np.ndarray:
        return np.array([complex(v) for v in arr], dtype=complex)

    @staticmethod
    def absf(arr) -> np.ndarray:
        return np.array([float(abs(v)) for v in arr])


# --- the map --------------------------------------------------------------

def _as_factored(f) -> FactoredPoly:
    if isinstance(f, FactoredPoly):
        return f
    if isinstance(f, UniPoly):
        return FactoredPoly(1, [(f, 1)]) if f.degree > 0 else FactoredPoly(f[0], [])
    raise TypeError("expected FactoredPoly or UniPoly")


@dataclass
class RationalMap:
    """f = p/q in factored form, with the fiber polynomial H(x, t) = p(x) - t q(x)."""

    p: FactoredPoly
    q: FactoredPoly

    def __post_init__(self):
        self.p = _as_factored(self.p)
        self.q = _as_factored(self.q)
        self.P = expand(self.p)
        self.Q = expand(self.q)
        self.degree = max(self.P.degree, self.Q.degree)

    def fiber_polynomial(self, t0) -> UniPoly:
        return self.P - self.Q * Fraction(t0)

    def _eval_factored(self, f: FactoredPoly, x: np.ndarray, bk: Backend):
        """Return (value, logarithmic derivative) arrays."""
        value = bk.array([f.constant] * len(x))
        logd = bk.zeros(len(x))
        for base, e in f.factors:
            v = bk.zeros(len(x))
            d = bk.zeros(len(x))
            for c in reversed(base.coeffs):
                d = d * x + v
                v = v * x + bk.scalar(c)
            value = value * v ** e
            logd = logd + (d / v) * e
        return value, logd

    def evaluate(self, x: np.ndarray, t, bk: Backend):
        """H, dH/dx, dH/dt and the scale |p| + |t q| used for relative residuals."""
        pv, pl = self._eval_factored(self.p, x, bk)
        qv, ql = self._eval_factored(self.q, x, bk)
        h = pv - qv * t
        dh = pv * pl - qv * ql * t
        return h, dh, -qv, pv, qv

    def value(self, x, bk: Backend):
        pv, _ = self._eval_factored(self.p, x, bk)
        qv, _ = self._eval_factored(self.q, x, bk)
        return pv / qv


# --- root finding -----------------------------------------------------------

def _horner(coeffs, x, bk: Backend):
    v = bk.zeros(len(x))
    d = bk.zeros(len(x))
    for c in reversed(coeffs):
        d = d * x + v
        v = v * x + c
    return v, d


def _aberth_sum(z):
    diff = z[:, None] - z[None, :]
    n = len(z)
    idx = np.arange(n)
    diff[idx, idx] = 1
    inv = 1 / diff
    inv[idx, idx] = 0
    return inv.sum(axis=1)


def _initial_guesses(coeffs_float: Sequence[complex], n: int) -> np.ndarray:
    mags = [abs(c) for c in coeffs_float]
    lead = mags[-1]
    radius = max((mags[k] / lead) ** (1.0 / (n - k)) for k in range(n) if mags[k]) if any(mags[:-1]) else 1.0
    geo = (mags[0] / lead) ** (1.0 / n) if mags[0] else radius / 2
    r = min(radius, max(geo, 1e-3))
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    return r * np.exp(1j * angles)


def _aberth_loop(evaluate, z, bk: Backend, tol, max_iter: int,
                 floor: float = 0.0) -> tuple[np.ndarray, bool]:
    """Iterate until corrections drop below ``tol``, or stall below ``floor``.

    Clustered roots stall at a level set by their conditioning; stalling under
    ``floor`` counts as converged and the caller certifies the result.
    """
    best, stall = math.inf, 0
    for _ in range(max_iter):
        v, d = evaluate(z)
        ratio = v / d
        w = ratio / (1 - ratio * _aberth_sum(z))
        if not bk.exact:
            w = np.where(np.isfinite(w), w, 0)
        z = z - w
        size = max(float(abs(wi)) / (1 + float(abs(zi))) for wi, zi in zip(w, z))
        if size <= tol:
            return z, True
        if size < best / 2:
            best, stall = size, 0
        else:
            stall += 1
            if stall >= 4 and best <= floor:
                return z, True
    return z, False


def aberth(coeffs: Sequence, precision: int = DEFAULT_PRECISION, start=None,
           max_iter: int = 2000) -> np.ndarray:
    """All roots of a polynomial (coefficients lowest first) by Aberth-Ehrlich iteration.

    A complex128 pass provides starting values for the working-precision pass.
    Returns an array in the backend of ``precision``.
    """
    n = len(coeffs) - 1
    if n < 1:
        return np.array([])
    cf = [complex(Fraction(c)) for c in coeffs]
    scale = max(abs(c) for c in cf)
    cf = [c / scale for c in cf]
    z = _initial_guesses(cf, n) if start is None else np.array(start, dtype=complex)
    dbl = Backend(53)
    with np.errstate(all="ignore"):
        z, _ = _aberth_loop(lambda u: _horner(cf, u, dbl), z, dbl, 1e-13, max_iter)
    bk = Backend(precision)
    if not bk.exact:
        return z
    with bk.active():
        exact = [bk.scalar(Fraction(c)) for c in coeffs]
        zz, ok = _aberth_loop(lambda u: _horner(exact, u, bk), bk.array(z), bk,
                              2.0 ** (-(precision - 12)), 200, 2.0 ** (-precision / 2))
    if not ok:
        raise NonConvergence("Aberth iteration did not converge at %d bits" % precision)
    return zz


def fiber_roots(fmap: "RationalMap", t0, precision: int, max_iter: int = 3000) -> np.ndarray:
    """Roots of p - t0 q by Aberth on the factored map, then Newton at ``precision``."""
    F = fmap.fiber_polynomial(t0)
    cf = [complex(c) for c in F.coeffs]
    scale = max(abs(c) for c in cf)
    z = _initial_guesses([c / scale for c in cf], F.degree)
    dbl = Backend(53)
    t = complex(Fraction(t0))

    def ev(u):
        h, dh, *_ = fmap.evaluate(u, t, dbl)
        return h, dh

    with np.errstate(all="ignore"):
        z, ok = _aberth_loop(ev, z, dbl, 1e-14, max_iter)
    if not ok:
        # stagnation at the double precision floor is fine when the residual is small
        resid = _relative_residual(fmap, z, t, dbl)
        if not resid < 1e-10:
            raise NonConvergence("double-precision Aberth stalled (residual %.3g)" % resid)
    bk = Backend(precision)
    if not bk.exact:
        return z
    with bk.active():
        return polish(fmap, bk.array(z), bk.scalar(Fraction(t0)), bk)


def inclusion_radii(coeffs: Sequence, roots: np.ndarray, precision: int) -> np.ndarray:
    """Radii n*|W_i| of disks around approximate roots (W_i the Weierstrass corrections).

    The union of the disks holds all roots and every connected component of m
    disks holds exactly m roots, so pairwise disjoint disks isolate one root each.
    """
    bk = Backend(precision)
    n = len(coeffs) - 1
    with bk.active():
        exact = [bk.scalar(Fraction(c)) for c in coeffs]
        v, _ = _horner(exact, roots, bk)
        diff = roots[:, None] - roots[None, :]
        idx = np.arange(n)
        diff[idx, idx] = 1
        prod = np.prod(diff, axis=1)
        w = v / (exact[-1] * prod)
        return np.array([float(abs(wi)) * n for wi in w])


def disks_disjoint(roots_c: np.ndarray, radii: np.ndarray) -> bool:
    dist = np.abs(roots_c[:, None] - roots_c[None, :])
    np.fill_diagonal(dist, np.inf)
    return bool(np.all(dist > radii[:, None] + radii[None, :]))


def _separations(zc: np.ndarray) -> np.ndarray:
    dist = np.abs(zc[:, None] - zc[None, :])
    np.fill_diagonal(dist, np.inf)
    return dist.min(axis=1)


# --- fibers -----------------------------------------------------------------

@dataclass(frozen=True)
class Fiber:
    parameter: complex
    roots: np.ndarray = field(repr=False, compare=False)
    precision_bits: int
    min_separation: float
    max_residual: float
    isolation_radius: float | None = None

    def complex_roots(self) -> np.ndarray:
        return Backend.to_complex(self.roots)

    def to_dict(self) -> dict:
        return {
            "parameter": [self.parameter.real, self.parameter.imag],
            "precision_bits": self.precision_bits,
            "min_separation": self.min_separation,
            "max_residual": self.max_residual,
            "isolation_radius": self.isolation_radius,
            "roots": [[z.real, z.imag] for z in self.complex_roots()],
        }


def _relative_residual(fmap: RationalMap, roots, t, bk: Backend) -> float:
    h, _, _, pv, qv = fmap.evaluate(roots, t, bk)
    worst = 0.0
    for hi, pi, qi in zip(h, pv, qv):
        denom = abs(pi) + abs(qi * t)
        r = float(abs(hi) / denom) if denom else float(abs(hi))
        worst = max(worst, r)
    return worst


def residual_tolerance(precision: int) -> float:
    return 2.0 ** (-(precision - 52)) if precision > 53 else 1e-12


def polish(fmap: RationalMap, roots, t, bk: Backend, max_iter: int = 30):
    tol = 2.0 ** (-(bk.precision - 8))
    for _ in range(max_iter):
        h, dh, *_ = fmap.evaluate(roots, t, bk)
        step = h / dh
        roots = roots - step
        if all(float(abs(s)) <= tol * (1 + float(abs(r))) for s, r in zip(step, roots)):
            break
    return roots


def basepoint_fiber(p, q, t0, precision_bits: int = DEFAULT_PRECISION,
                    max_precision: int = MAX_PRECISION) -> Fiber:
    """All roots of p(x) - t0 q(x) at ``precision_bits``, checked against the residual tolerance.

    Raises RamifiedFiber when t0 is a branch value (degree drop or repeated roots).
    """
    fmap = p if isinstance(p, RationalMap) else RationalMap(p, q)
    t0 = Fraction(t0)
    F = fmap.fiber_polynomial(t0)
    if F.degree != fmap.degree:
        raise RamifiedFiber("degree drops to %d at t = %s: a point of the fiber is at infinity"
                            % (F.degree, t0))
    from .qpoly import gcd

    if gcd(F, F.derivative()).degree > 0:
        raise RamifiedFiber("p - %s*q has repeated roots; %s is a branch value" % (t0, t0))
    prec = precision_bits
    while True:
        try:
            roots = fiber_roots(fmap, t0, prec)
            bk = Backend(prec)
            with bk.active():
                resid = _relative_residual(fmap, roots, bk.scalar(t0), bk)
            if resid > residual_tolerance(prec):
                raise NonConvergence("residual %.3g above tolerance" % resid)
            radii = inclusion_radii(F.coeffs, roots, prec)
            if not disks_disjoint(Backend.to_complex(roots), radii):
                raise NonConvergence("inclusion disks overlap")
            break
        except NonConvergence:
            if prec >= max_precision:
                raise
            prec *= 2
            log.info("escalating root-finding precision to %d bits", prec)
    zc = Backend.to_complex(roots)
    order = np.lexsort((np.round(zc.imag, 9), np.round(zc.real, 9)))
    roots = roots[order]
    zc = zc[order]
    sep = float(_separations(zc).min())
    if sep <= 0:
        raise RamifiedFiber("coincident roots at t = %s" % t0)
    return Fiber(complex(t0), roots, prec, sep, resid, float(radii.max()))


# --- paths ------------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    """A line from ``start`` to ``end`` or an arc on |t - center| = radius."""

    kind: str
    start: complex = 0j
    end: complex = 0j
    center: complex = 0j
    radius: float = 0.0
    angle0: float = 0.0
    turns: float = 0.0  # signed number of full turns; positive is counterclockwise

    def point(self, s, bk: Backend):
        if self.kind == "line":
            a, b = bk.scalar(self.start), bk.scalar(self.end)
            return a + (b - a) * s
        angle = self.angle0 + 2 * bk.pi() * self.turns * s
        return bk.scalar(self.center) + bk.expi(angle) * self.radius

    def reversed(self) -> "Segment":
        if self.kind == "line":
            return Segment("line", start=self.end, end=self.start)
        return Segment("arc", center=self.center, radius=self.radius,
                       angle0=self.angle0 + 2 * math.pi * self.turns, turns=-self.turns)


@dataclass(frozen=True)
class LoopSpec:
    base_point: complex
    target: str
    radius: float
    orientation: str
    waypoints: tuple[Segment, ...]

    def to_dict(self) -> dict:
        return {"base_point": [self.base_point.real, self.base_point.imag], "target": self.target,
                "radius": self.radius, "orientation": self.orientation,
                "segments": [s.kind for s in self.waypoints]}


def standard_loop(target: str, base: float = 0.5, radius: float = 0.25,
                  inf_radius: float = 3.0) -> LoopSpec:
    """Loops around 0, 1 and infinity based at ``base`` (see module docstring)."""
    if target == "0":
        touch = complex(radius, 0)
        arc = Segment("arc", center=0j, radius=radius, angle0=0.0, turns=1.0)
    elif target == "1":
        touch = complex(1 - radius, 0)
        arc = Segment("arc", center=1 + 0j, radius=radius, angle0=math.pi, turns=1.0)
    elif target == "inf":
        h = math.sqrt(inf_radius ** 2 - base ** 2)
        touch = complex(base, h)
        arc = Segment("arc", center=0j, radius=inf_radius, angle0=math.atan2(h, base), turns=-1.0)
        radius = inf_radius
    else:
        raise ValueError("target must be '0', '1' or 'inf'")
    b = complex(base, 0)
    go = Segment("line", start=b, end=touch)
    return LoopSpec(b, target, radius, "counterclockwise" if target != "inf" else
                    "clockwise about 0 (counterclockwise about infinity)",
                    (go, arc, go.reversed()))


def real_segment(a, b) -> tuple[Segment, ...]:
    return (Segment("line", start=complex(a), end=complex(b)),)


# --- tracking ---------------------------------------------------------------

@dataclass
class TrackStats:
    steps: int = 0
    rejected: int = 0
    precise_steps: int = 0
    max_newton_residual: float = 0.0
    min_separation: float = math.inf
    accumulated_error: float = 0.0
    samples: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"steps": self.steps, "rejected": self.rejected,
                "precise_steps": self.precise_steps,
                "max_newton_residual": self.max_newton_residual,
                "min_separation": self.min_separation,
                "accumulated_error": self.accumulated_error}


@dataclass(frozen=True)
class TrackerConfig:
    initial_step: float = 1 / 32
    max_step: float = 1 / 16
    min_step: float = 1e-12
    step_scale: float = 1.0          # multiplies all step bounds; 0.5 halves the steps
    newton_iters: int = 4
    drift_fraction: float = 1 / 3
    collision_factor: float = 3.0
    adaptive: bool = True            # complex128 steps where safe, working precision elsewhere
    guard_separation: float = 1e-8  # relative separation below which steps go to full precision
    guard_step: float = 1e-6        # step size below which steps go to full precision
    record: bool = False
    log_file: object = None          # writable text stream for the step log


def _attempt(fmap, x, t_now, t_new, dh, dt, bk, cfg, stats, tol):
    """One predictor-corrector step; returns (new roots, newton size) or None if rejected."""
    zc = Backend.to_complex(x) if bk.exact else x
    sep = _separations(zc)
    pred = x - (dt / dh) * (t_new - t_now)  # dx/dt = q / (p' - t q')
    y = pred
    last = math.inf
    for _ in range(cfg.newton_iters):
        hv, dhv, *_ = fmap.evaluate(y, t_new, bk)
        step = hv / dhv
        y = y - step
        last = float((Backend.absf(step) / (1 + Backend.absf(y))).max())
        if last <= tol:
            break
    else:
        return None
    yc = Backend.to_complex(y) if bk.exact else y
    pc = Backend.to_complex(pred) if bk.exact else pred
    new_sep = _separations(yc)
    err = stats.accumulated_error + last
    if (np.all(np.abs(yc - pc) <= cfg.drift_fraction * sep)
            and np.all(np.abs(yc - zc) <= sep / 2)
            and np.all(new_sep > cfg.collision_factor * err * (1 + np.abs(yc)))):
        return y, yc, last, new_sep
    return None


def _track_segment(fmap: RationalMap, roots, seg: Segment, work: Backend,
                   cfg: TrackerConfig, stats: TrackStats):
    """Track ``roots`` (working precision) along ``seg``; returns working-precision roots."""
    dbl = Backend(53)
    s = 0.0
    h = cfg.initial_step * cfg.step_scale
    hmax = cfg.max_step * cfg.step_scale
    tol_work = residual_tolerance(work.precision) * 1e3 if work.exact else 1e-12
    use_double = cfg.adaptive and work.exact
    x = Backend.to_complex(roots) if use_double else roots
    bk = dbl if use_double else work
    t_now = seg.point(0.0, bk)
    _, dh, dt, *_ = fmap.evaluate(x, t_now, bk)
    while s < 1.0:
        h = min(h, 1.0 - s)
        s_new = 1.0 if s + h >= 1.0 else s + h
        t_new = seg.point(s_new, bk)
        tol = 1e-12 if bk is dbl else tol_work
        got = _attempt(fmap, x, t_now, t_new, dh, dt, bk, cfg, stats, tol)
        if got is None:
            stats.rejected += 1
            h /= 2
            if bk is dbl and h < cfg.guard_step * cfg.step_scale:
                bk, x = work, work.array(x)
                t_now = seg.point(s, bk)
                _, dh, dt, *_ = fmap.evaluate(x, t_now, bk)
                continue
            if h < cfg.min_step * cfg.step_scale:
                raise TrackingError("step size underflow at t = %s (segment %s, s = %.6g)"
                                    % (complex(t_now), seg.kind, s))
            continue
        x, xc, last, new_sep = got
        t_now, s = t_new, s_new
        stats.steps += 1
        if bk.exact:
            stats.precise_steps += 1
        stats.max_newton_residual = max(stats.max_newton_residual, last)
        stats.min_separation = min(stats.min_separation, float(new_sep.min()))
        stats.accumulated_error += last
        if cfg.record:
            stats.samples.append((complex(t_now), xc))
        if cfg.log_file is not None:
            cfg.log_file.write("step %d t=%.12g%+.12gj h=%.3g bits=%d newton=%.3g sep=%.3g\n"
                               % (stats.steps, complex(t_now).real, complex(t_now).imag, h,
                                  bk.precision, last, float(new_sep.min())))
        if use_double:
            close = bool(np.any(new_sep < cfg.guard_separation * (1 + np.abs(xc))))
            want = work if close else dbl
            if want is not bk:
                bk = want
                x = work.array(xc) if want is work else xc
                t_now = seg.point(s, bk)
        _, dh, dt, *_ = fmap.evaluate(x, t_now, bk)
        h = min(h * 1.5, hmax)
    if bk is dbl:
        x = work.array(x)
    return x


def track(fmap: RationalMap, fiber: Fiber, path: Sequence[Segment],
          config: TrackerConfig = TrackerConfig()) -> tuple[Fiber, TrackStats]:
    """Continue every root of ``fiber`` along ``path``; strand i of the result continues root i.

    The end fiber is polished at the fiber's precision and its residual recorded.
    """
    work = Backend(fiber.precision_bits)
    stats = TrackStats()
    with work.active():
        roots = fiber.roots.copy()
        if config.record:
            stats.samples.append((fiber.parameter, Backend.to_complex(roots)))
        for seg in path:
            roots = _track_segment(fmap, roots, seg, work, config, stats)
            t_end = seg.point(1.0, work)
            roots = polish(fmap, roots, t_end, work)
        resid = _relative_residual(fmap, roots, t_end, work)
    zc = Backend.to_complex(roots)
    sep = float(_separations(zc).min())
    if resid > residual_tolerance(fiber.precision_bits):
        raise NonConvergence("end fiber residual %.3g above tolerance" % resid)
    return Fiber(complex(t_end), roots, fiber.precision_bits, sep, resid), stats


def match_fibers(start: Fiber, end: Fiber, ratio: float = 10.0) -> list[int]:
    """For each strand of ``end``, the index of the ``start`` root it landed on."""
    a = start.complex_roots()
    b = end.complex_roots()
    dist = np.abs(b[:, None] - a[None, :])
    order = np.argsort(dist, axis=1)
    out = []
    for i in range(len(b)):
        best, second = dist[i, order[i, 0]], dist[i, order[i, 1]]
        if not best * ratio <= second:
            raise TrackingError("ambiguous match for strand %d (%.3g vs %.3g)" % (i + 1, best, second))
        out.append(int(order[i, 0]))
    if sorted(out) != list(range(len(b))):
        raise TrackingError("matching is not a bijection")
    return out


# --- monodromy ---------------------------------------------------------------

@dataclass
class MonodromyResult:
    sigma0: Permutation
    sigma1: Permutation
    sigma_inf: Permutation
    labeling: list[complex]
    diagnostics: dict

    def product_is_identity(self) -> bool:
        return compose(compose(self.sigma0, self.sigma1), self.sigma_inf).is_identity()

    def to_dict(self) -> dict:
        return {"sigma0": str(self.sigma0), "sigma1": str(self.sigma1),
                "sigma_inf": str(self.sigma_inf),
                "labeling": [[z.real, z.imag] for z in self.labeling],
                "diagnostics": self.diagnostics}


@dataclass(frozen=True)
class MonodromyConfig:
    base_point: Fraction = Fraction(1, 2)
    radius: float = 0.25
    inf_radius: float = 3.0
    precision: int = DEFAULT_PRECISION
    step_scale: float = 1.0
    max_precision: int = 4 * DEFAULT_PRECISION


def loop_monodromy(fmap: RationalMap, base: Fiber, loop: LoopSpec,
                   config: TrackerConfig = TrackerConfig()) -> tuple[Permutation, TrackStats]:
    end, stats = track(fmap, base, loop.waypoints, config)
    images = match_fibers(base, end)
    return Permutation(tuple(i + 1 for i in images)), stats


def monodromy_triple(p, q=None, config: MonodromyConfig = MonodromyConfig(),
                     log_file=None) -> MonodromyResult:
    """Loop permutations around 0, 1 and infinity, with precision escalation on tracking failure."""
    fmap = p if isinstance(p, RationalMap) else RationalMap(p, q)
    precision = config.precision
    while True:
        try:
            return _monodromy_at(fmap, config, precision, log_file)
        except (TrackingError, NonConvergence) as exc:
            if precision * 2 > config.max_precision:
                raise
            log.warning("monodromy failed at %d bits (%s); retrying at %d", precision, exc, precision * 2)
            precision *= 2


def _monodromy_at(fmap, config, precision, log_file) -> MonodromyResult:
    base = basepoint_fiber(fmap, None, config.base_point, precision)
    tcfg = TrackerConfig(step_scale=config.step_scale, log_file=log_file)
    perms = {}
    diag = {"precision_bits": base.precision_bits, "base_point": str(config.base_point),
            "base_min_separation": base.min_separation, "base_residual": base.max_residual}
    for target in ("0", "1", "inf"):
        loop = standard_loop(target, float(config.base_point), config.radius, config.inf_radius)
        perm, stats = loop_monodromy(fmap, base, loop, tcfg)
        perms[target] = perm
        diag["loop_" + target] = stats.to_dict()
    return MonodromyResult(perms["0"], perms["1"], perms["inf"],
                           list(base.complex_roots()), diag)

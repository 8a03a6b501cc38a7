"""The verification pipeline: validate, group, polys, ramify, rh, disc, monodromy, dessin.

Each stage appends checks to one report and never aborts the run, so a
corrupted dataset yields every finding at once.  Stages that cannot run
because an earlier parse failed are recorded as failed with the reason.
"""

from __future__ import annotations

import dataclasses
import logging
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import tomli

from . import __version__, belyi
from .datainput import Dataset, ParseError, validate_dataset
from .permgroup import (OrderLimitExceeded, Permutation, build_chain, candidate_block_sizes,
                        cycle_type, is_transitive, minimal_block_systems, sign, subdegrees)
from .report import Check, VerificationReport

log = logging.getLogger(__name__)

STAGES = ("validate", "group", "polys", "ramify", "rh", "disc", "monodromy", "dessin")

# |Aut(HS)| as published in the ATLAS of finite groups (2 * 44 352 000)
ATLAS_AUT_HS_ORDER = 88_704_000


@dataclass
class PipelineConfig:
    skip: tuple[str, ...] = ()
    seed: int = 0
    threads: int = 1
    precision: int = 212
    recheck: bool = True            # rerun monodromy at doubled precision and halved steps
    disc_samples_t: tuple[str, ...] = tuple(str(s) for s in belyi.DEFAULT_T_SAMPLES)
    disc_samples_s: tuple[str, ...] = tuple(str(s) for s in belyi.DEFAULT_S_SAMPLES)
    min_samples: int = 5
    specialization_points: tuple[str, ...] = tuple(str(s) for s in belyi.DEFAULT_SPECIALIZATION_POINTS)
    primes_per_point: int = 3
    prime_budget: int = 200
    dessin_epsilon: float = 1e-3
    dessin_out: str | None = None

    def __post_init__(self):
        bad = set(self.skip) - set(STAGES)
        if bad:
            raise ValueError("unknown stage(s): %s" % ", ".join(sorted(bad)))
        if self.min_samples < 1:
            raise ValueError("min_samples must be positive")

    @classmethod
    def from_dict(cls, raw: dict) -> "PipelineConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - names
        if unknown:
            raise ValueError("unknown config key(s): %s" % ", ".join(sorted(unknown)))
        data = {k: tuple(v) if isinstance(v, list) else v for k, v in raw.items()}
        return cls(**data)

    @classmethod
    def from_toml(cls, path) -> "PipelineConfig":
        raw = tomli.loads(Path(path).read_text())
        return cls.from_dict(raw.get("pipeline", raw))

    def replace(self, **changes) -> "PipelineConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _run(stage: str, fn, report: VerificationReport, *args):
    start = time.perf_counter()
    try:
        checks = fn(*args)
    except Exception as exc:  # a stage failure is a finding, not a crash
        log.exception("stage %s failed", stage)
        checks = [Check("%s.error" % stage, "stage execution", "fail",
                        {"error": "%s: %s" % (type(exc).__name__, exc)})]
    elapsed = time.perf_counter() - start
    for c in checks:
        if c.seconds is None:
            c.seconds = elapsed / len(checks)
    report.extend(checks)
    return checks


# --- group certificates ----------------------------------------------------

def group_checks(gens: list[Permutation], expect: dict, label: str = "group",
                 seed: int = 0) -> list[Check]:
    ref = "group generated by the triple"
    checks = []
    start = time.perf_counter()
    want = expect.get("order")
    try:
        chain = build_chain(gens, seed=seed, order_limit=want)
    except OrderLimitExceeded as exc:
        # far larger than expected (typically the alternating or symmetric group)
        chain = None
        checks.append(Check("%s.order" % label, "order of <x, y>", "fail",
                            {"order_at_least": exc.lower_bound, "expected": want},
                            time.perf_counter() - start))
    else:
        order = chain.order()
        checks.append(Check("%s.order" % label, "order of <x, y>",
                            "pass" if order == want else "fail",
                            {"order": order, "expected": want, "base": list(chain.base_points),
                             "orbit_sizes": list(chain.orbit_sizes)}, time.perf_counter() - start))
    trans = is_transitive(gens)
    checks.append(Check("%s.transitive" % label, ref, "pass" if trans else "fail", {}))
    if not trans:
        return checks
    want_subs = list(expect.get("subdegrees", []))
    if chain is None:
        checks.append(Check("%s.subdegrees" % label, "subdegrees of the point stabilizer", "fail",
                            {"error": "no stabilizer chain: order limit exceeded",
                             "expected": want_subs}))
        systems = minimal_block_systems(gens)
        checks.append(Check("%s.primitive" % label, "no nontrivial block system",
                            "pass" if not systems else "fail", {"block_systems": len(systems)}))
        return checks
    subs = subdegrees(chain, 1)
    checks.append(Check("%s.subdegrees" % label, "subdegrees of the point stabilizer",
                        "pass" if subs == want_subs else "fail",
                        {"subdegrees": subs, "expected": want_subs, "rank": len(subs)}))
    sizes = candidate_block_sizes(subs, gens[0].degree)
    checks.append(Check("%s.block_sizes" % label, "block sizes must divide the degree",
                        "pass" if not any(sizes.values()) else "fail",
                        {"candidate_sizes": {str(k): v for k, v in sizes.items()}}))
    systems = minimal_block_systems(gens)
    checks.append(Check("%s.primitive" % label, "no nontrivial block system",
                        "pass" if not systems else "fail",
                        {"block_systems": len(systems),
                         "first_block": sorted(next(iter(systems[0]))) if systems else None}))
    return checks


def stage_group(d: Dataset, cfg: PipelineConfig) -> list[Check]:
    x, y, z = d.permutations()
    checks = group_checks([x, y], d.expect, "group", cfg.seed)
    signs = {"x": sign(x), "y": sign(y), "z": sign(z)}
    odd = [k for k, s in signs.items() if s == -1]
    checks.append(Check("group.odd_permutation", "not contained in the alternating group",
                        "pass" if odd else "fail", {"signs": signs}))
    checks.append(Check("group.atlas_order", "published order of Aut(HS)",
                        "pass" if d.expect.get("order") == ATLAS_AUT_HS_ORDER else "fail",
                        {"dataset": d.expect.get("order"), "atlas": ATLAS_AUT_HS_ORDER}))
    checks.append(Check("group.classification", "rank 3 primitive groups of degree 100", "external",
                        {"fact": "a primitive rank 3 group of degree 100 with subdegrees 1, 22, 77, "
                                 "order 88704000 and odd permutations is Aut(HS)",
                         "source": "classification of rank 3 primitive groups (cited)"}))
    checks.append(Check("group.rigidity", "rigid and rational triple", "external",
                        {"fact": "rigidity and rationality of the class triple",
                         "source": "character-theoretic class counting (cited)"}))
    return checks


# --- stages ------------------------------------------------------------------

def _triple_by_value(d: Dataset) -> dict[str, Permutation]:
    perms = dict(zip("xyz", d.permutations()))
    branch = d.expect.get("branch", {"zero": "x", "one": "y", "infinity": "z"})
    keys = {"zero": "0", "one": "1", "infinity": "inf"}
    return {keys[k]: perms[v] for k, v in branch.items()}


def _signs_by_value(d: Dataset) -> dict[str, int]:
    return {v: sign(p) for v, p in _triple_by_value(d).items()}


def stage_rh(d: Dataset, spec) -> list[Check]:
    types = {v: cycle_type(p) for v, p in _triple_by_value(d).items()}
    prof = belyi.ramification_profile(spec)
    from_poly = {v: prof.cycle_type(v) for v in belyi.BRANCH_VALUES}
    return [belyi.riemann_hurwitz_check(types, d.degree, ".triple"),
            belyi.riemann_hurwitz_check(from_poly, spec.degree, ".map")]


def stage_disc(d: Dataset, spec, cfg: PipelineConfig) -> list[Check]:
    checks = belyi.discriminant_square_evidence(
        spec, "t", [Fraction(s) for s in cfg.disc_samples_t], cfg.threads, cfg.min_samples)
    if d.expect.get("disc_square_family"):
        checks += belyi.discriminant_square_evidence(
            spec, d.expect["disc_square_family"], [Fraction(s) for s in cfg.disc_samples_s],
            cfg.threads, cfg.min_samples)
    checks.append(belyi.parity_bridge(spec, _signs_by_value(d)))
    checks += belyi.specialization_evidence(
        spec, [Fraction(s) for s in cfg.specialization_points], cfg.primes_per_point)
    return checks


def stage_monodromy(d: Dataset, spec, cfg: PipelineConfig, state: dict) -> list[Check]:
    from .monodromy import MonodromyConfig, monodromy_triple

    ref = "branch cycles from the map"
    start = time.perf_counter()
    res = monodromy_triple(spec.p, spec.q, MonodromyConfig(precision=cfg.precision))
    elapsed = time.perf_counter() - start
    state["monodromy"] = res
    perms = {"0": res.sigma0, "1": res.sigma1, "inf": res.sigma_inf}
    checks = [Check("monodromy.product", "x*y*z = 1", "pass" if res.product_is_identity() else "fail",
                    {"diagnostics": res.diagnostics}, elapsed)]
    for v, perm in perms.items():
        want = spec.expected_cycle_types.get(v)
        got = cycle_type(perm)
        checks.append(Check("monodromy.cycle_type_%s" % v, ref, "pass" if got == want else "fail",
                            {"found": str(got), "expected": str(want)}))
    checks.append(belyi.riemann_hurwitz_check({v: cycle_type(p) for v, p in perms.items()},
                                              d.degree, ".monodromy"))
    checks += group_checks([res.sigma0, res.sigma1], d.expect, "monodromy.group", cfg.seed)
    if cfg.recheck:
        start = time.perf_counter()
        again = monodromy_triple(spec.p, spec.q,
                                 MonodromyConfig(precision=2 * cfg.precision, step_scale=0.5,
                                                 max_precision=8 * cfg.precision))
        same = (again.sigma0, again.sigma1, again.sigma_inf) == (res.sigma0, res.sigma1, res.sigma_inf)
        checks.append(Check("monodromy.recheck", "doubled precision, halved steps",
                            "pass" if same else "fail",
                            {"precision_bits": again.diagnostics["precision_bits"], "identical": same},
                            time.perf_counter() - start))
    return checks


def stage_dessin(d: Dataset, spec, cfg: PipelineConfig, state: dict) -> list[Check]:
    from .dessin import DessinConfig, compute_dessin, dessin_permutations, render

    ref = "dessin d'enfant"
    start = time.perf_counter()
    g = compute_dessin(spec, cfg=DessinConfig(epsilon=cfg.dessin_epsilon, precision=cfg.precision))
    elapsed = time.perf_counter() - start
    counts = g.counts()
    types = spec.expected_cycle_types
    want = {"black": types["0"].num_cycles, "white": types["1"].num_cycles, "edges": d.degree,
            "faces": types["inf"].num_cycles, "euler": 2}
    ok = all(counts[k] == v for k, v in want.items())
    checks = [Check("dessin.counts", ref, "pass" if ok else "fail",
                    {"found": counts, "expected": want, "epsilon": list(g.epsilon)}, elapsed)]
    s0, s1 = dessin_permutations(g)
    ok = cycle_type(s0) == types["0"] and cycle_type(s1) == types["1"]
    checks.append(Check("dessin.cycle_types", ref, "pass" if ok else "fail",
                        {"sigma0": str(cycle_type(s0)), "sigma1": str(cycle_type(s1))}))
    res = state.get("monodromy")
    if res is not None:
        same = s0 == res.sigma0 and s1 == res.sigma1
        checks.append(Check("dessin.matches_monodromy", ref, "pass" if same else "fail",
                            {"identical": same}))
    checks += group_checks([s0, s1], d.expect, "dessin.group", cfg.seed)[:2]
    if cfg.dessin_out:
        path = render(g, cfg.dessin_out)
        checks.append(Check("dessin.render", "figure of the dessin", "pass",
                            {"svg": str(path), "sidecar": str(path.with_suffix(".json"))}))
    return checks


def conclusion(report: VerificationReport, d: Dataset) -> str:
    ok = {c.id: c.ok for c in report.checks}
    needed = ["group.order", "group.subdegrees", "group.primitive", "group.odd_permutation"]
    if all(ok.get(k) for k in needed):
        return ("group data consistent with Aut(HS): rank 3, subdegrees 1/22/77, primitive, "
                "contains odd permutations, order %d; identification via the classification of "
                "rank 3 primitive groups is an external fact" % d.expect.get("order", 0))
    missing = [k for k in needed if not ok.get(k)]
    return "group identification not established (%s)" % ", ".join(missing)


def run_pipeline(d: Dataset, cfg: PipelineConfig | None = None) -> VerificationReport:
    cfg = cfg or PipelineConfig()
    random.seed(cfg.seed)
    report = VerificationReport(d.name, tool_version=__version__, config=cfg.to_dict())
    state: dict = {}
    run = [s for s in STAGES if s not in cfg.skip]
    for s in cfg.skip:
        report.checks.append(Check("%s.skipped" % s, "stage disabled", "skipped", {}))
    if "validate" in run:
        _run("validate", validate_dataset, report, d)
    perm_error = spec_error = ""
    try:
        d.permutations()
        perms_ok = True
    except (ParseError, KeyError, ValueError) as exc:
        perms_ok = False
        perm_error = "%s: %s" % (type(exc).__name__, exc)
    try:
        spec = d.map_spec()
    except (ParseError, KeyError, ValueError) as exc:
        spec = None
        spec_error = "%s: %s" % (type(exc).__name__, exc)
    for stage in run[1:] if run and run[0] == "validate" else run:
        needs_perms = stage in ("group", "rh", "disc")
        needs_spec = stage != "group"
        if needs_perms and not perms_ok:
            report.checks.append(Check("%s.blocked" % stage, "stage prerequisites", "fail",
                                       {"error": perm_error}))
            continue
        if needs_spec and spec is None:
            report.checks.append(Check("%s.blocked" % stage, "stage prerequisites", "fail",
                                       {"error": spec_error}))
            continue
        if stage == "group":
            _run(stage, stage_group, report, d, cfg)
        elif stage == "polys":
            _run(stage, belyi.verify_difference, report, spec, cfg.prime_budget)
        elif stage == "ramify":
            _run(stage, lambda s: belyi.critical_divisor_check(s) + belyi.branch_cycle_consistency(s)[1],
                 report, spec)
        elif stage == "rh":
            _run(stage, stage_rh, report, d, spec)
        elif stage == "disc":
            _run(stage, stage_disc, report, d, spec, cfg)
        elif stage == "monodromy":
            _run(stage, stage_monodromy, report, d, spec, cfg, state)
        elif stage == "dessin":
            _run(stage, stage_dessin, report, d, spec, cfg, state)
    report.conclusion = conclusion(report, d)
    return report

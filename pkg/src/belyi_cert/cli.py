"""Command line entry point: ``belyi-cert <command> <dataset> [options]``.

Exit status is 0 iff the verdict of the checks run is pass; usage errors exit 2.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from fractions import Fraction

from . import __version__, belyi
from .datainput import load_dataset
from .pipeline import STAGES, PipelineConfig, run_pipeline
from .report import VerificationReport

SUBCOMMANDS = ("verify", "group", "polys", "ramify", "disc", "monodromy", "dessin", "emit")

# stages each narrow command runs (validation always comes first)
_ONLY = {
    "group": ("validate", "group"),
    "polys": ("validate", "polys"),
    "ramify": ("validate", "ramify", "rh"),
    "monodromy": ("validate", "monodromy"),
    "dessin": ("validate", "dessin"),
}


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--report", metavar="FILE", default=d, help="write the JSON report here")
    p.add_argument("--seed", type=int, default=d if suppress else 0)
    p.add_argument("--threads", type=int, default=d if suppress else 1,
                   help="worker processes for per-sample work")
    p.add_argument("--config", metavar="FILE", default=d, help="TOML pipeline configuration")
    p.add_argument("-v", "--verbose", action="store_true", default=d if suppress else False)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="belyi-cert", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True
    cmds = {}
    helps = {
        "verify": "run the full pipeline",
        "group": "group certificates for <x, y>",
        "polys": "identities for p - q and irreducibility of its factors",
        "ramify": "critical divisor identity, branch cycles, Riemann-Hurwitz",
        "disc": "discriminant square-class evidence",
        "monodromy": "numerical branch cycles of f",
        "dessin": "compute and draw the dessin d'enfant",
        "emit": "print p(X) - s(t) q(X)",
    }
    for name in SUBCOMMANDS:
        c = sub.add_parser(name, help=helps[name])
        c.add_argument("dataset", help="bundled name (hs-map-1, hs-map-2) or a .toml path")
        _global_flags(c, suppress=True)
        cmds[name] = c
    cmds["verify"].add_argument("--skip", action="append", default=[], choices=STAGES,
                                help="skip a stage (repeatable)")
    cmds["verify"].add_argument("--dessin-out", metavar="FILE")
    cmds["disc"].add_argument("--family", choices=sorted(belyi.SUBSTITUTIONS), default="t")
    cmds["disc"].add_argument("--samples", type=int, default=5)
    cmds["monodromy"].add_argument("--precision", type=int, default=None, metavar="BITS")
    cmds["monodromy"].add_argument("--no-recheck", action="store_true")
    cmds["dessin"].add_argument("--out", metavar="FILE", required=True)
    cmds["emit"].add_argument("--subst", choices=sorted(belyi.SUBSTITUTIONS), default="t")
    return parser


def extra_samples(count: int, seed: int, avoid=(0, 1)) -> list[Fraction]:
    """Deterministic pseudo-random rationals beyond the default sample list."""
    rng = random.Random(seed)
    out: list[Fraction] = []
    while len(out) < count:
        v = Fraction(rng.randint(-40, 40), rng.randint(1, 9))
        if v not in avoid and v not in out:
            out.append(v)
    return out


def _samples(defaults, n: int, seed: int) -> tuple[str, ...]:
    vals = [Fraction(v) for v in defaults][:n]
    if n > len(vals):
        vals += extra_samples(n - len(vals), seed, avoid=tuple(vals) + (0, 1))
    return tuple(str(v) for v in vals)


def _emit(report: VerificationReport, args) -> int:
    for line in report.summary_lines():
        print(line)
    if report.conclusion:
        print("CONCLUSION " + report.conclusion)
    if getattr(args, "report", None):
        with open(args.report, "w") as fh:
            fh.write(report.to_json() + "\n")
    return 0 if report.verdict == "pass" else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    try:
        cfg = PipelineConfig.from_toml(args.config) if args.config else PipelineConfig()
    except (OSError, ValueError, TypeError) as exc:
        parser.error("bad config: %s" % exc)
    cfg = cfg.replace(seed=args.seed, threads=args.threads)
    try:
        dataset = load_dataset(args.dataset)
    except FileNotFoundError as exc:
        parser.error(str(exc))

    if args.command == "emit":
        print(belyi.emit_galois_polynomial(dataset.map_spec(), args.subst))
        return 0
    if args.command == "disc":
        if args.samples < 1:
            parser.error("--samples must be at least 1")
        spec = dataset.map_spec()
        report = VerificationReport(dataset.name, tool_version=__version__, config=cfg.to_dict())
        if args.family == "t":
            samples = _samples(cfg.disc_samples_t, args.samples, cfg.seed)
        else:
            samples = _samples(cfg.disc_samples_s, args.samples, cfg.seed)
        report.extend(belyi.discriminant_square_evidence(
            spec, args.family, [Fraction(s) for s in samples], cfg.threads,
            min(cfg.min_samples, args.samples)))
        code = _emit(report, args)
        for row in report.checks[0].witness["samples"]:
            print("  sample %-8s t0 = %-8s %s" % (row["sample"], row["t0"],
                                                 "agrees" if row["agrees"] else "DISAGREES"))
        return code
    if args.command == "verify":
        cfg = cfg.replace(skip=tuple(sorted(set(cfg.skip) | set(args.skip))))
        if args.dessin_out:
            cfg = cfg.replace(dessin_out=args.dessin_out)
    else:
        keep = _ONLY[args.command]
        cfg = cfg.replace(skip=tuple(s for s in STAGES if s not in keep))
        if args.command == "monodromy":
            if args.precision is not None:
                if args.precision < 53:
                    parser.error("--precision must be at least 53 bits")
                cfg = cfg.replace(precision=args.precision)
            if args.no_recheck:
                cfg = cfg.replace(recheck=False)
        if args.command == "dessin":
            cfg = cfg.replace(dessin_out=args.out)
    report = run_pipeline(dataset, cfg)
    if args.command != "verify":
        report.checks = [c for c in report.checks if not c.id.endswith(".skipped")]
    code = _emit(report, args)
    if args.command == "monodromy":
        for c in report.checks:
            if c.id == "monodromy.product":
                print(json.dumps(c.witness["diagnostics"], indent=1, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Run the full pipeline on both bundled maps; write reports and dessin figures to out/."""

import argparse
import time
from pathlib import Path

from belyi_cert.datainput import BUNDLED, load_dataset
from belyi_cert.pipeline import PipelineConfig, run_pipeline


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out")
    ap.add_argument("--precision", type=int, default=212)
    ap.add_argument("--no-recheck", action="store_true")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    status = 0
    for name in BUNDLED:
        cfg = PipelineConfig(precision=args.precision, recheck=not args.no_recheck,
                             dessin_out=str(out / ("%s-dessin.svg" % name)))
        start = time.perf_counter()
        rep = run_pipeline(load_dataset(name), cfg)
        (out / ("%s-report.json" % name)).write_text(rep.to_json() + "\n")
        print("== %s: %s in %.1fs" % (name, rep.verdict.upper(), time.perf_counter() - start))
        for line in rep.summary_lines():
            print("  " + line)
        print("  " + rep.conclusion)
        status |= rep.verdict != "pass"
    return status


if __name__ == "__main__":
    raise SystemExit(main())

"""Per-stage wall time of the pipeline on each bundled map."""

import time

from belyi_cert.datainput import BUNDLED, load_dataset
from belyi_cert.pipeline import STAGES, PipelineConfig, run_pipeline


def main():
    for name in BUNDLED:
        d = load_dataset(name)
        for stage in STAGES[1:]:
            skip = tuple(s for s in STAGES if s not in ("validate", stage))
            start = time.perf_counter()
            rep = run_pipeline(d, PipelineConfig(skip=skip))
            print("%-9s %-10s %-5s %7.2fs" % (name, stage, rep.verdict, time.perf_counter() - start))


if __name__ == "__main__":
    main()

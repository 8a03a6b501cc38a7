"""Draw the dessins of the bundled maps (or of X^n stars) as SVG with JSON sidecars."""

import argparse
from pathlib import Path

from belyi_cert.datainput import BUNDLED, load_dataset
from belyi_cert.dessin import DessinConfig, compute_dessin, render
from belyi_cert.qpoly import UniPoly


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", default=list(BUNDLED),
                    help="bundled dataset names or starN for the map X^N")
    ap.add_argument("--out", default="out")
    ap.add_argument("--size", type=int, default=800)
    ap.add_argument("--epsilon", type=float, default=1e-3)
    args = ap.parse_args()
    cfg = DessinConfig(epsilon=args.epsilon)
    for name in args.names:
        if name.startswith("star"):
            g = compute_dessin(UniPoly.x() ** int(name[4:]), UniPoly.const(1), cfg)
        else:
            g = compute_dessin(load_dataset(name).map_spec(), cfg=cfg)
        path = render(g, Path(args.out) / ("%s-dessin.svg" % name), args.size)
        c = g.counts()
        print("%s: %d black, %d white, %d edges, %d faces -> %s"
              % (name, c["black"], c["white"], c["edges"], c["faces"], path))


if __name__ == "__main__":
    main()

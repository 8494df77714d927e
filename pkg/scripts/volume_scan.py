"""Ball volume against |Lambda| for the builtin examples, with fitted log-log slopes.

    python3 scripts/volume_scan.py --samples 200000 --out volume_scan.csv
"""

import argparse
import sys

from mlradon.flows import FlowConfig, loglog_slope, volume_vs_lambda
from mlradon.flows.experiments import fmt, to_csv
from mlradon.polytope import build_polytope
from mlradon.specfile import load_spec


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--specs", default="lw2,tao-wright,heisenberg")
    ap.add_argument("--s", default="0.2,0.1,0.05,0.025", help="radii s, used as delta=(s,...,s)")
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", help="CSV path (default: stdout)")
    args = ap.parse_args()

    s_list = [float(v) for v in args.s.split(",")]
    cfg = FlowConfig(seed=args.seed)
    rows = []
    for name in args.specs.split(","):
        spec = load_spec(name)
        cat = spec.catalog()
        predicted = min(sum(g) for g in build_polytope(cat).minimal_generators)
        scan = volume_vs_lambda(spec.fields, cat, (0.0,) * spec.n, [(s,) * spec.k for s in s_list], cfg, args.samples)
        slope = loglog_slope(s_list, [r.volume for r in scan])
        print(f"{name}: slope {fmt(slope)}, predicted {predicted}", file=sys.stderr)
        rows += [[name, s, r.volume, r.lam, r.ratio, slope, predicted] for s, r in zip(s_list, scan)]
    text = to_csv(["spec", "s", "volume", "lambda", "ratio", "slope", "predicted_slope"], rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()

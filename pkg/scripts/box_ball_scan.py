"""|B_j(0; delta)| for every flow sequence j, beside the full ball |B(0; delta)|."""

import argparse
import sys

from mlradon.flows import FlowConfig, box_ball_scan, volume_vs_lambda
from mlradon.flows.experiments import fmt, to_csv
from mlradon.specfile import load_spec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--spec", default="heisenberg")
    ap.add_argument("--delta", type=float, default=0.1)
    ap.add_argument("--samples", type=int, default=50_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    spec = load_spec(args.spec)
    cfg = FlowConfig(seed=args.seed)
    delta = (args.delta,) * spec.k
    x0 = (0.0,) * spec.n
    full = volume_vs_lambda(spec.fields, spec.catalog(), x0, [delta], cfg, args.samples)[0].volume
    rows = box_ball_scan(spec.fields, x0, delta, cfg, args.samples)
    print(f"|B| = {fmt(full)}; best sequence {rows[0].js} at ratio {fmt(rows[0].volume / full)}", file=sys.stderr)
    sys.stdout.write(to_csv(["sequence", "volume", "ratio_to_ball"], [["-".join(map(str, r.js)), r.volume, r.volume / full] for r in rows]))


if __name__ == "__main__":
    main()

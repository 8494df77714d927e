"""max |Y_wi(t) - e_i| and |det Y| over a range of K for the builtin examples."""

import argparse
import sys

from mlradon.flows import FlowConfig, phi_chart, chart_diagnostics
from mlradon.flows.experiments import to_csv
from mlradon.specfile import load_spec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--specs", default="lw2,tao-wright,heisenberg")
    ap.add_argument("--K", default="4,8,16,32,64")
    ap.add_argument("--delta", type=float, default=0.05)
    ap.add_argument("--samples", type=int, default=400)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = FlowConfig(seed=args.seed)
    rows = []
    for name in args.specs.split(","):
        spec = load_spec(name)
        cat = spec.catalog()
        for K in (float(v) for v in args.K.split(",")):
            chart = phi_chart(cat, (0,) * spec.n, (args.delta,) * spec.k, K, cfg=cfg, n_samples=args.samples)
            rep = chart_diagnostics(chart, cfg=cfg)
            rows.append([name, K, rep.y0_error, rep.y_dev_max, rep.y_dev_const, rep.det_min, rep.det_max])
    sys.stdout.write(to_csv(["spec", "K", "y0_error", "y_dev_max", "y_dev_over_t_by_K", "det_min", "det_max"], rows))


if __name__ == "__main__":
    main()

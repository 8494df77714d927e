"""Blow-up of alpha^b / |Omega| on anisotropic balls, beside an interior control.

    python3 scripts/witness_demo.py --spec lw2 --b 1/2,1/2 --control-p 3/2,3/2
"""

import argparse
import sys
from fractions import Fraction

from mlradon.exponents import ExponentTuple
from mlradon.flows import FlowConfig, necessity_witness
from mlradon.flows.experiments import fmt
from mlradon.polytope import build_polytope
from mlradon.specfile import load_spec


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--spec", default="lw2")
    ap.add_argument("--b", default="1/2,1/2", help="target b vector outside the polytope")
    ap.add_argument("--control-p", default="3/2,3/2")
    ap.add_argument("--delta0", default="0.125,0.0625,0.03125,0.015625")
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    spec = load_spec(args.spec)
    P = build_polytope(spec.catalog())
    b = tuple(Fraction(v) for v in args.b.split(","))
    table = necessity_witness(
        spec.fields,
        spec.maps,
        P,
        b,
        [float(v) for v in args.delta0.split(",")],
        FlowConfig(seed=args.seed),
        args.samples,
        control=ExponentTuple.parse(args.control_p),
    )
    print(f"a = {fmt(table.functional.a)}, growth {fmt(table.growth)}, control band {fmt(table.control_band)}", file=sys.stderr)
    sys.stdout.write(table.csv())


if __name__ == "__main__":
    main()

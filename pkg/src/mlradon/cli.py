"""Command line front end: ``mlradon <command> [SPEC] [flags]``.

Exit codes: 0 success, 1 ``verify`` found a failing check, 2 usage error,
3 parse error (spec file, exponent list, polytope file), 4 precondition
failure (empty polytope, b inside P, caps too small), 5 numerical failure
(divergent flow, singular chart).
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .exponents import ExponentError, ExponentTuple, classify
from .flows import (
    BallSpec,
    FlowConfig,
    NumericalError,
    doubling_ratio,
    loglog_slope,
    necessity_witness,
    phi_chart,
    sample_ball,
    chart_diagnostics,
    volume_vs_lambda,
)
from .flows.ball import OccupancyGrid
from .flows.experiments import WitnessPrecondition, fmt, to_csv
from .polytope import PolytopeError, build_polytope, from_text, to_text, vertices
from .specfile import ProblemSpec, SpecError, load_spec
from .symalg import PolynomialError, format_polynomial
from .words import WordError, enumerate_tuples, hormander_check, lambda_vector, word_degree

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_PRECONDITION = 4
EXIT_NUMERICAL = 5


class UsageError(ValueError):
    pass


def _word(w) -> str:
    return "(" + ",".join(map(str, w)) + ")"


def _floats(text: str, what: str) -> list[float]:
    try:
        vals = [float(Fraction(s)) for s in text.replace(" ", "").split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse {what} {text!r}") from exc
    if any(v <= 0 for v in vals):
        raise UsageError(f"{what} entries must be positive")
    return vals


def _delta(text: str, k: int) -> tuple[float, ...]:
    vals = _floats(text, "delta")
    if len(vals) == 1:
        vals = vals * k
    if len(vals) != k:
        raise UsageError(f"delta needs 1 or {k} entries, got {len(vals)}")
    return tuple(vals)


def _delta_list(text: str, k: int) -> list[tuple[float, ...]]:
    """``0.2,0.1,0.05`` (each value for every j) or ``0.2,0.1;0.1,0.05`` (one tuple per item)."""
    if ";" in text:
        return [_delta(item, k) for item in text.split(";") if item.strip()]
    return [(v,) * k for v in _floats(text, "delta list")]


def _b_vector(text: str) -> tuple[Fraction, ...]:
    try:
        b = tuple(Fraction(s) for s in text.replace(" ", "").split(","))
    except (ValueError, ZeroDivisionError) as exc:
        raise ExponentError(f"cannot parse b vector {text!r}") from exc
    if any(v < 0 for v in b):
        raise ExponentError("b must be non-negative")
    return b


def _config(args) -> FlowConfig:
    return FlowConfig(seed=args.seed)


def _spec(args) -> ProblemSpec:
    spec = load_spec(args.spec)
    if args.eps is not None:
        spec.eps = Fraction(args.eps)
        if spec.eps <= 0:
            raise UsageError("--eps must be positive")
    if args.cap is not None:
        if args.cap < 1:
            raise UsageError("--cap must be at least 1")
        spec.cap = args.cap
    return spec


def _header(args, spec: ProblemSpec | None, **extra) -> list[str]:
    parts = [f"mlradon {__version__} {args.command}"]
    if spec is not None:
        cat = spec.catalog()
        parts.append(f"spec={spec.name} n={spec.n} k={spec.k} mode={spec.mode}")
        parts.append(f"eps={spec.eps} cap={cat.describe_cap()}")
    parts.append(f"seed={args.seed}")
    parts += [f"{k}={v}" for k, v in extra.items()]
    return ["# " + " ".join(parts)]


def _write_csv(args, header, rows) -> None:
    if args.csv:
        Path(args.csv).write_text(to_csv(header, rows), encoding="utf-8")


# ---- subcommands -------------------------------------------------------------


def cmd_brackets(args, out) -> int:
    spec = _spec(args)
    cat = spec.catalog()
    origin = (0,) * spec.n
    out(_header(args, spec))
    out([f"{'word':<14}{'degree':<12}value at 0 / field"])
    rows = []
    for w in cat.words:
        X = cat.word_field(w)
        deg = word_degree(w, cat.k)
        at0 = X.at(origin)
        comps = ", ".join(format_polynomial(c, spec.names) for c in X.components)
        out([f"{_word(w):<14}{_word(deg):<12}{_word(at0)}  [{comps}]"])
        rows.append([_word(w), _word(deg), *at0])
    out([f"{len(cat.words)} nonzero words"])
    _write_csv(args, ["word", "degree"] + [f"X{i + 1}(0)" for i in range(spec.n)], rows)
    return EXIT_OK


def cmd_hormander(args, out) -> int:
    spec = _spec(args)
    res = hormander_check(spec.catalog())
    out(_header(args, spec))
    out([f"hormander at 0: {res}"])
    return EXIT_OK if res.spans else EXIT_PRECONDITION


def cmd_polytope(args, out) -> int:
    spec = _spec(args)
    cat = spec.catalog()
    P = build_polytope(cat)
    tuples = [t for t in enumerate_tuples(cat) if t.nonvanishing]
    out(_header(args, spec))
    out([f"nonvanishing tuples: {len(tuples)}; distinct degrees: {len(P.generators)}"])
    out(["minimal generators:"] + ["  " + _word(g) for g in vertices(P)])
    rows = [[t.label(), _word(t.degree), t.value] for t in tuples]
    _write_csv(args, ["tuple", "degree", "lambda_at_0"], rows)
    if args.out:
        Path(args.out).write_text(to_text(P), encoding="utf-8")
    return EXIT_OK


def _polytope_for(args, spec: ProblemSpec):
    if args.polytope:
        try:
            return from_text(Path(args.polytope).read_text(encoding="utf-8"))
        except OSError as exc:
            raise PolytopeError(f"cannot read {args.polytope!r}: {exc.strerror}") from exc
        except ValueError as exc:
            if isinstance(exc, PolytopeError):
                raise
            raise PolytopeError(f"cannot parse polytope file: {exc}") from exc
    return build_polytope(spec.catalog())


def cmd_classify(args, out) -> int:
    if not args.p:
        raise UsageError("classify needs --p")
    spec = _spec(args)
    p = ExponentTuple.parse(args.p)
    if p.k != spec.k:
        raise ExponentError(f"--p has {p.k} entries, the spec has k={spec.k}")
    note = None
    try:
        P = _polytope_for(args, spec)
    except PolytopeError as exc:
        if args.polytope:
            raise
        P, note = None, str(exc)  # bracket condition fails: classify reports it
    res = classify(p, P)
    out(_header(args, spec, p=str(p)))
    if note:
        out([f"# note: {note}"])
    out([f"verdict: {res.verdict.value}"])
    if res.b is not None:
        out([f"b(p) = {fmt(res.b)}"])
    if res.margin is not None:
        out([f"interior margin = {res.margin}"])
    if res.certificate:
        out([f"reason: {res.certificate}"])
    return EXIT_OK


def cmd_ball(args, out) -> int:
    spec = _spec(args)
    delta = _delta(args.delta or "0.1", spec.k)
    h = args.h if args.h is not None else min(delta) / 32
    cfg = _config(args)
    bs = BallSpec((0.0,) * spec.n, delta, args.segments, args.samples, h, float(spec.eps))
    cloud = sample_ball(spec.fields, bs, cfg)
    grid = OccupancyGrid.from_points(cloud.points, h, origin=bs.x0)
    lam = lambda_vector(spec.catalog(), (0,) * spec.n, delta, 1.0)
    out(_header(args, spec, samples=args.samples, segments=bs.segments, h=fmt(h), steps_per_unit=cfg.steps_per_unit))
    out(
        [
            f"delta = {fmt(delta)} (nondegenerate for eps={spec.eps}: {'yes' if bs.nondegenerate else 'no'})",
            f"occupied cells = {grid.count}",
            f"|B(0; delta)| = {fmt(grid.measure)}",
            f"|Lambda_delta(0)| = {fmt(lam.norm)} via {lam.argmax.label()}",
            f"ratio = {fmt(grid.measure / lam.norm)}",
        ]
    )
    _write_csv(args, [f"c{i + 1}" for i in range(spec.n)], grid.centers)
    return EXIT_OK


def cmd_volume_scan(args, out) -> int:
    spec = _spec(args)
    deltas = _delta_list(args.delta_list or "0.2,0.1,0.05,0.025", spec.k)
    cat = spec.catalog()
    rows = volume_vs_lambda(spec.fields, cat, (0.0,) * spec.n, deltas, _config(args), args.samples)
    out(_header(args, spec, samples=args.samples))
    out([f"{'delta':<28}{'|B|':<18}{'|Lambda|':<18}ratio"])
    for r in rows:
        out([f"{fmt(r.delta):<28}{fmt(r.volume):<18}{fmt(r.lam):<18}{fmt(r.ratio)}"])
    if len(rows) > 1:
        s = [min(r.delta) for r in rows]
        if len(set(s)) == len(s):
            out([f"log-log slope of |B| against min(delta): {fmt(loglog_slope(s, [r.volume for r in rows]))}"])
    if len(rows) >= 1:
        P = build_polytope(cat)
        out([f"min over minimal generators of 1.g: {min(sum(g) for g in P.minimal_generators)}"])
    header = [f"delta{j + 1}" for j in range(spec.k)] + ["volume", "lambda", "ratio"]
    _write_csv(args, header, [[*r.delta, r.volume, r.lam, r.ratio] for r in rows])
    return EXIT_OK


def cmd_doubling(args, out) -> int:
    spec = _spec(args)
    delta = _delta(args.delta or "0.1", spec.k)
    h = args.h
    ratio = doubling_ratio(spec.fields, (0.0,) * spec.n, delta, _config(args), args.samples, h=h)
    grid = "relative" if h is None else f"h={fmt(h)} and 2h"
    out(_header(args, spec, samples=args.samples, grid=grid))
    out([f"|B(0; 2 delta)| / |B(0; delta)| at delta={fmt(delta)}: {fmt(ratio)}"])
    return EXIT_OK


def cmd_chart(args, out) -> int:
    spec = _spec(args)
    delta = _delta(args.delta or "0.05", spec.k)
    Ks = _floats(args.K, "K") if args.K else [spec.K]
    cfg = _config(args)
    cat = spec.catalog()
    out(_header(args, spec, delta=fmt(delta), samples=args.samples))
    rows = []
    for K in Ks:
        chart = phi_chart(cat, (0,) * spec.n, delta, K, cfg=cfg, n_samples=args.samples)
        rep = chart_diagnostics(chart, cfg=cfg)
        out([f"chart words: {' '.join(_word(w) for w in chart.words)}"] + rep.lines())
        rows.append([K, rep.y0_error, rep.y_dev_max, rep.det_min, rep.det_max, rep.volume_ratio_min, rep.volume_ratio_max])
    header = ["K", "y0_error", "y_dev_max", "det_min", "det_max", "vol_ratio_min", "vol_ratio_max"]
    _write_csv(args, header, rows)
    return EXIT_OK


def cmd_witness(args, out) -> int:
    spec = _spec(args)
    if (args.p is None) == (args.b is None):
        raise UsageError("witness needs exactly one of --p and --b")
    if not spec.has_all_maps:
        raise WitnessPrecondition("the witness needs a map for every j (add 'map j:' lines)")
    target = ExponentTuple.parse(args.p) if args.p else _b_vector(args.b)
    control = None
    if args.control_p:
        control = ExponentTuple.parse(args.control_p)
    elif args.control_b:
        control = _b_vector(args.control_b)
    d0 = _floats(args.delta0_list or "0.125,0.0625,0.03125,0.015625", "delta0 list")
    P = build_polytope(spec.catalog())
    table = necessity_witness(spec.fields, spec.maps, P, target, d0, _config(args), args.samples, control=control)
    out(_header(args, spec, samples=args.samples))
    out(
        [
            f"b = {fmt(table.b)}",
            f"separating functional a = {fmt(table.functional.a)} (margin {table.functional.margin})",
        ]
    )
    for r in table.rows:
        line = f"delta0={fmt(r.delta0)} delta={fmt(r.delta)} |Omega|={fmt(r.omega)} alpha={fmt(r.alpha)} ratio={fmt(r.ratio)}"
        if r.control_ratio is not None:
            line += f" control={fmt(r.control_ratio)}"
        out([line])
    out([f"increasing: {'yes' if table.increasing else 'no'}; growth {fmt(table.growth)}"])
    if table.control_b is not None:
        out([f"control b = {fmt(table.control_b)}; max/first = {fmt(table.control_band)}"])
    if args.csv:
        Path(args.csv).write_text(table.csv(), encoding="utf-8")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    from .acceptance import run_all

    out([f"# mlradon {__version__} verify seed={args.seed}"])
    ok = run_all(args.seed, emit=lambda s: out([s]), log=lambda s: print(s, file=sys.stderr))
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


COMMANDS = {
    "brackets": (cmd_brackets, "table of nonzero bracket words up to the cap"),
    "hormander": (cmd_hormander, "exact bracket-spanning test at 0"),
    "polytope": (cmd_polytope, "Newton polytope generators (and --out serialization)"),
    "classify": (cmd_classify, "verdict for an exponent tuple --p"),
    "ball": (cmd_ball, "Monte Carlo volume of one ball"),
    "volume-scan": (cmd_volume_scan, "ball volume against |Lambda| over a list of radii"),
    "doubling": (cmd_doubling, "ball doubling ratio"),
    "chart": (cmd_chart, "exponential chart diagnostics for --K values"),
    "witness": (cmd_witness, "blow-up of the restricted weak-type ratio"),
    "verify": (cmd_verify, "run the acceptance suite"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mlradon", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"mlradon {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--csv", metavar="PATH", help="also write plot-ready CSV here")
    common.add_argument("--samples", type=int, default=200_000)

    with_spec = argparse.ArgumentParser(add_help=False, parents=[common])
    with_spec.add_argument("spec", help="builtin name (lw2, lw3, tao-wright, heisenberg) or path to a spec file")
    with_spec.add_argument("--eps", help="tuple cap parameter (default from spec, else 1/4)")
    with_spec.add_argument("--cap", type=int, help="maximum word length (default from spec, else 4)")
    with_spec.add_argument("--K", help="chart constant; a comma list for chart")
    with_spec.add_argument("--delta", help="radii, one value or k values")
    with_spec.add_argument("--h", type=float, help="grid cell size")

    for name, (_, help_) in COMMANDS.items():
        parents = [common] if name == "verify" else [with_spec]
        sp = sub.add_parser(name, help=help_, parents=parents)
        if name in ("classify", "witness"):
            sp.add_argument("--p", help="exponents, e.g. 2,2,2 or 3/2,inf")
        if name == "classify":
            sp.add_argument("--polytope", metavar="PATH", help="read the polytope from a file written by 'polytope --out'")
        if name == "polytope":
            sp.add_argument("--out", metavar="PATH", help="write the polytope in text form")
        if name == "ball":
            sp.add_argument("--segments", type=int, help="flow segments per sample (default 3n)")
        if name == "volume-scan":
            sp.add_argument("--delta-list", help="0.2,0.1,... or 0.2,0.1;0.1,0.05;...")
        if name == "witness":
            sp.add_argument("--b", help="target b vector directly, e.g. 1/2,1/2")
            sp.add_argument("--delta0-list", help="comma list of delta0 values")
            sp.add_argument("--control-p", help="interior control exponents")
            sp.add_argument("--control-b", help="interior control b vector")
    return parser


def run(argv: list[str], stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    def out(lines):
        for line in lines:
            print(line, file=stdout)

    fn = COMMANDS[args.command][0]
    t0 = time.perf_counter()
    try:
        code = fn(args, out)
    except UsageError as exc:
        print(f"mlradon: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SpecError, PolynomialError) as exc:
        print(f"mlradon: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PolytopeError as exc:
        kind = "parse error" if getattr(args, "polytope", None) else "precondition failed"
        print(f"mlradon: {kind}: {exc}", file=sys.stderr)
        return EXIT_PARSE if getattr(args, "polytope", None) else EXIT_PRECONDITION
    except ExponentError as exc:
        print(f"mlradon: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (WitnessPrecondition, WordError) as exc:
        print(f"mlradon: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"mlradon: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"[{args.command}: {time.perf_counter() - t0:.2f} s]", file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

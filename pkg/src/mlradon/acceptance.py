"""The acceptance suite behind ``mlradon verify``.

Each check returns a :class:`Check`; reports contain no timings (those go to
the caller), so two runs with the same seed print identical text.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .exponents import ExponentTuple, Verdict, b_of_p, classify, p_of_b, sigma
from .flows import (
    BallSpec,
    FlowConfig,
    ball_volume,
    doubling_ratio,
    loglog_slope,
    necessity_witness,
    phi_chart,
    sample_ball,
    chart_diagnostics,
    volume_vs_lambda,
)
from .flows.experiments import fmt
from .polytope import build_polytope, vertices
from .specfile import load_spec
from .symalg import Polynomial, PolyVectorField, lie_bracket, random_field
from .words import Catalog, bracket_tree_field, expand_bracket

GOLDEN = {
    "lw2": [(1, 1)],
    "tao-wright": [(1, 2), (2, 1)],
    "heisenberg": [(2, 2)],
}


@dataclass
class Check:
    name: str
    passed: bool
    details: list[str] = field(default_factory=list)
    seconds: float = 0.0

    def lines(self) -> list[str]:
        head = f"[{'PASS' if self.passed else 'FAIL'}] {self.name}"
        return [head] + ["    " + d for d in self.details]


def _timed(limit: float | None):
    def deco(fn):
        def run(*args, **kwargs) -> Check:
            t0 = time.perf_counter()
            chk = fn(*args, **kwargs)
            chk.seconds = time.perf_counter() - t0
            if limit is not None:
                ok = chk.seconds < limit
                chk.details.append(f"runtime under {limit:g} s: {'yes' if ok else 'no'}")
                chk.passed = chk.passed and ok
            return chk

        run.__name__ = fn.__name__
        return run

    return deco


@_timed(10)
def check_symbolic(seed: int = 0, triples: int = 100) -> Check:
    rng = np.random.default_rng(seed)
    anti = jacobi = 0
    for i in range(triples):
        n = 2 + i % 3  # n in {2, 3, 4}
        X, Y, Z = (random_field(rng, n, 3, n_terms=2) for _ in range(3))
        if (lie_bracket(X, Y) + lie_bracket(Y, X)).is_zero():
            anti += 1
        total = (
            lie_bracket(X, lie_bracket(Y, Z))
            + lie_bracket(Y, lie_bracket(Z, X))
            + lie_bracket(Z, lie_bracket(X, Y))
        )
        if total.is_zero():
            jacobi += 1
    expansion = expand_bracket(((1, 2), (3, 4)))
    want = [(1, (1, 2, 3, 4)), (-1, (1, 2, 4, 3))]
    # the same identity on concrete random generators, through the fields themselves
    gens = [random_field(rng, 3, 2, n_terms=2) for _ in range(4)]
    cat = Catalog(gens, max_length=4)
    combo = PolyVectorField([Polynomial.zero(3)] * 3)
    for c, w in expansion:
        combo = combo + cat.word_field(w) * c
    direct = bracket_tree_field(((1, 2), (3, 4)), gens)
    ok = anti == triples and jacobi == triples and expansion == want and combo == direct
    return Check(
        "C1 symbolic exactness",
        ok,
        [
            f"antisymmetry exact on {anti}/{triples} random triples",
            f"Jacobi exact on {jacobi}/{triples} random triples",
            "[[X1,X2],[X3,X4]] = " + " ".join(f"{c:+d}*X{w}" for c, w in expansion).replace(" ", ""),
            f"expansion matches direct bracket on random fields: {'yes' if combo == direct else 'no'}",
        ],
    )


@_timed(30)
def check_polytopes() -> Check:
    ok = True
    details = []
    for name, want in GOLDEN.items():
        spec = load_spec(name)
        got = vertices(build_polytope(spec.catalog()))
        got_up = vertices(build_polytope(spec.catalog(cap=spec.cap + 1)))
        good = got == want and got_up == want
        ok &= good
        details.append(
            f"{name}: minimal generators {got} (cap {spec.cap}), {got_up} (cap {spec.cap + 1}); expected {want}"
        )
    return Check("C2 polytope golden set", ok, details)


def random_admissible_p(rng, k: int) -> ExponentTuple:
    while True:
        recips = [Fraction(int(rng.integers(0, 13)), 12) for _ in range(k)]
        if sum(recips) > 1:
            return ExponentTuple(tuple(recips))


@_timed(None)
def check_exponents(seed: int = 0, trials: int = 1000) -> Check:
    rng = np.random.default_rng(seed + 1)
    lw = b_of_p(ExponentTuple.of([2, 2, 2]))
    roundtrip = 0
    for _ in range(trials):
        p = random_admissible_p(rng, int(rng.integers(2, 6)))
        b = b_of_p(p)
        if b_of_p(p_of_b(b)) == b and p_of_b(b) == p:
            roundtrip += 1
    holder_ok = 0
    for _ in range(trials):
        k = int(rng.integers(2, 5))
        recips = tuple(Fraction(int(rng.integers(0, 16)), 10) for _ in range(k))
        p = ExponentTuple(recips)
        v = classify(p, None).verdict
        expect_holder = sigma(p) <= 1 and all(r <= 1 for r in recips)
        if (v is Verdict.HOLDER_TRIVIAL) == expect_holder:
            holder_ok += 1
    ok = lw == (1, 1, 1) and roundtrip == trials and holder_ok == trials
    return Check(
        "C3 exponent calculus",
        ok,
        [
            f"b(2,2,2) = {fmt(lw)}",
            f"p_of_b round trip exact on {roundtrip}/{trials} random admissible tuples",
            f"HOLDER_TRIVIAL iff sigma<=1 and all p_j>=1 on {holder_ok}/{trials} random tuples",
        ],
    )


@_timed(60)
def check_ball_calibration(seed: int = 0) -> Check:
    cfg = FlowConfig(seed=seed)
    spec = load_spec("lw2")
    delta = (0.2, 0.1)
    h = min(delta) / 32
    cloud = sample_ball(spec.fields, BallSpec((0.0, 0.0), delta, n_samples=200_000), cfg)
    vol = ball_volume(cloud, h)
    rel = abs(vol - 0.04) / 0.04
    dbl = doubling_ratio(spec.fields, (0.0, 0.0), delta, cfg, 200_000, h=h)
    ok = rel <= 0.05 and abs(dbl - 4) / 4 <= 0.10
    return Check(
        "C4 ball volume calibration (LW R^2)",
        ok,
        [
            f"|B(0;(0.2,0.1))| = {fmt(vol)} vs 0.04 (rel err {fmt(rel)}, tol 0.05)",
            f"doubling ratio = {fmt(dbl)} vs 4 (tol 10%)",
        ],
    )


@_timed(300)
def check_scaling(seed: int = 0) -> Check:
    cfg = FlowConfig(seed=seed)
    s_list = [0.2, 0.1, 0.05, 0.025]
    ok = True
    details = []
    for name, want in (("heisenberg", 4), ("tao-wright", 3)):
        spec = load_spec(name)
        cat = spec.catalog()
        P = build_polytope(cat)
        predicted = min(sum(g) for g in P.minimal_generators)
        rows = volume_vs_lambda(spec.fields, cat, (0.0,) * spec.n, [(s,) * spec.k for s in s_list], cfg)
        slope = loglog_slope(s_list, [r.volume for r in rows])
        ratios = [r.ratio for r in rows]
        good = abs(slope - want) <= 0.3 and predicted == want
        ok &= good
        details.append(
            f"{name}: slope {fmt(slope)} (want {want} +- 0.3; min_g 1.g = {predicted}); "
            f"|B|/|Lambda| in [{fmt(min(ratios))}, {fmt(max(ratios))}]"
        )
    return Check("C5 scaling exponents", ok, details)


@_timed(None)
def check_chart(seed: int = 0) -> Check:
    cfg = FlowConfig(seed=seed)
    delta = (0.05, 0.05)
    ok = True
    details = []
    strictly = False
    for name in GOLDEN:
        spec = load_spec(name)
        cat = spec.catalog()
        devs = []
        for K in (4, 8, 16, 32):
            rep = chart_diagnostics(phi_chart(cat, (0,) * spec.n, delta, K, cfg=cfg, n_samples=200), cfg=cfg)
            devs.append(rep.y_dev_max)
            if K == 8:
                good = rep.passed["Y0"] and rep.passed["det"]
                ok &= good
                details.append(
                    f"{name} K=8: |Y_wi(0)-e_i| = {rep.y0_error:.1e} (tol 1e-5), "
                    f"|det Y| in [{fmt(rep.det_min)}, {fmt(rep.det_max)}] (band [0.5, 2])"
                )
        mono = all(b <= a + 1e-9 for a, b in zip(devs, devs[1:]))
        if all(b < a for a, b in zip(devs, devs[1:])) and devs[0] > 1e-9:
            strictly = True
        ok &= mono
        details.append(f"{name} max|Y_wi(t)-e_i| over K=4,8,16,32: {', '.join(f'{d:.3e}' for d in devs)}")
    ok &= strictly
    details.append(f"strict decrease in K seen on a non-flat example: {'yes' if strictly else 'no'}")
    return Check("C6 chart estimates", ok, details)


@_timed(120)
def check_necessity(seed: int = 0) -> Check:
    cfg = FlowConfig(seed=seed)
    spec = load_spec("lw2")
    P = build_polytope(spec.catalog())
    d0 = [2.0**-e for e in range(3, 7)]
    table = necessity_witness(
        spec.fields, spec.maps, P, (Fraction(1, 2), Fraction(1, 2)), d0, cfg,
        control=ExponentTuple.of(["3/2", "3/2"]),
    )
    ok = table.increasing and table.growth >= 3 and table.control_band <= 2
    return Check(
        "C7 necessity blow-up (LW R^2)",
        ok,
        [
            f"separating functional a = {fmt(table.functional.a)}, margin {table.functional.margin}",
            "ratio by delta0: " + ", ".join(f"{fmt(r.delta0)}:{fmt(r.ratio)}" for r in table.rows),
            f"monotone increasing: {'yes' if table.increasing else 'no'}; cumulative growth {fmt(table.growth)} (need >= 3)",
            "control b=(2,2) ratios: " + ", ".join(fmt(r.control_ratio) for r in table.rows),
            f"control max/first = {fmt(table.control_band)} (need <= 2)",
        ],
    )


@_timed(None)
def check_worker_independence(seed: int = 0) -> Check:
    spec = load_spec("heisenberg")
    bs = BallSpec((0.0, 0.0, 0.0), (0.1, 0.1), n_samples=40_000)
    one = sample_ball(spec.fields, bs, FlowConfig(seed=seed, workers=1)).points
    three = sample_ball(spec.fields, bs, FlowConfig(seed=seed, workers=3)).points
    same = one.tobytes() == three.tobytes()
    return Check(
        "C8 determinism across worker counts",
        same,
        [f"ball samples with 1 and 3 workers bit-identical: {'yes' if same else 'no'}"],
    )


CHECKS: list[tuple[str, Callable[..., Check]]] = [
    ("symbolic", check_symbolic),
    ("polytopes", lambda seed: check_polytopes()),
    ("exponents", check_exponents),
    ("calibration", check_ball_calibration),
    ("scaling", check_scaling),
    ("chart", check_chart),
    ("necessity", check_necessity),
    ("determinism", check_worker_independence),
]


def run_all(seed: int = 0, emit=print, log=None) -> bool:
    ok = True
    for key, fn in CHECKS:
        chk = fn(seed=seed)
        for line in chk.lines():
            emit(line)
        if log is not None:
            log(f"{chk.name}: {chk.seconds:.1f} s")
        ok &= chk.passed
    emit(f"overall: {'PASS' if ok else 'FAIL'}")
    return ok

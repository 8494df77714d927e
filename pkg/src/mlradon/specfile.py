"""Line-oriented problem specs.

Example::

    # Heisenberg group in R^3
    n=3 k=2
    field 1: 1, 0, 0
    map 2: x1, x3 - x1*x2

``key=value`` lines set the header (``n``, ``k``, ``vars``, ``eps``, ``cap``,
``K``, ``seed``, ``V``).  ``field j:`` gives the components of X_j; ``map j:``
gives a submersion pi_j whose kernel field is derived.  Both may be given for
the same j, in which case they must be compatible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .symalg import (
    PolyMap,
    PolynomialError,
    PolyVectorField,
    apply_field,
    evaluate,
    kernel_field,
    parse_polynomial,
)
from .words import DEFAULT_MAX_LENGTH, Catalog

BUILTINS = {
    "lw2": "lw2.spec",
    "lw3": "lw3.spec",
    "tao-wright": "tao_wright.spec",
    "heisenberg": "heisenberg.spec",
}

_DIRECTIVE = re.compile(r"^(field|map)\s+(\d+)\s*:(.*)$")


class SpecError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        super().__init__(f"line {line}: {msg}" if line else msg)
        self.line = line


@dataclass
class ProblemSpec:
    n: int
    k: int
    fields: list[PolyVectorField]
    maps: list[PolyMap | None]
    mode: str
    names: list[str]
    eps: Fraction = Fraction(1, 4)
    cap: int = DEFAULT_MAX_LENGTH
    K: float = 8.0
    seed: int = 0
    V: float | None = None
    name: str = ""
    source: str = field(default="", repr=False)

    def catalog(self, cap: int | None = None, eps=None) -> Catalog:
        return Catalog(self.fields, cap or self.cap, self.eps if eps is None else eps)

    @property
    def has_all_maps(self) -> bool:
        return all(m is not None for m in self.maps)


def _split_components(text: str) -> list[str]:
    parts = [p.strip() for p in text.split(",")]
    if any(not p for p in parts):
        raise PolynomialError("empty component")
    return parts


def parse_spec(text: str, name: str = "") -> ProblemSpec:
    header: dict[str, tuple[str, int]] = {}
    directives: list[tuple[str, int, str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _DIRECTIVE.match(line)
        if m:
            directives.append((m.group(1), int(m.group(2)), m.group(3), lineno))
            continue
        tokens = line.split()
        if all("=" in t for t in tokens):
            for t in tokens:
                key, val = t.split("=", 1)
                if key in header:
                    raise SpecError(f"duplicate header key {key!r}", lineno)
                header[key] = (val, lineno)
            continue
        raise SpecError(f"cannot parse {raw.strip()!r}", lineno)

    for key in ("n", "k"):
        if key not in header:
            raise SpecError(f"missing header key {key}=...")
    known = {"n", "k", "vars", "eps", "cap", "K", "seed", "V"}
    for key, (_, ln) in header.items():
        if key not in known:
            raise SpecError(f"unknown header key {key!r}", ln)

    def get(key, conv, default=None):
        if key not in header:
            return default
        val, ln = header[key]
        try:
            return conv(val)
        except (ValueError, ZeroDivisionError) as exc:
            raise SpecError(f"bad value for {key}: {val!r}", ln) from exc

    n, k = get("n", int), get("k", int)
    if n < 2 or k < 1:
        raise SpecError("need n >= 2 and k >= 1", header["n"][1])
    names = get("vars", lambda v: v.split(","), [f"x{i + 1}" for i in range(n)])
    if len(names) != n:
        raise SpecError(f"vars lists {len(names)} names for n={n}", header["vars"][1])
    eps = get("eps", Fraction, Fraction(1, 4))
    if eps <= 0:
        raise SpecError("eps must be positive", header["eps"][1])
    cap = get("cap", int, DEFAULT_MAX_LENGTH)
    K = get("K", float, 8.0)
    seed = get("seed", int, 0)
    V = get("V", float, None)

    fields: list[PolyVectorField | None] = [None] * k
    maps: list[PolyMap | None] = [None] * k
    lines_of: dict[tuple[str, int], int] = {}
    for kind, j, body, ln in directives:
        if not 1 <= j <= k:
            raise SpecError(f"{kind} index {j} outside 1..{k}", ln)
        if (kind, j) in lines_of:
            raise SpecError(f"{kind} {j} given twice", ln)
        lines_of[(kind, j)] = ln
        try:
            comps = _split_components(body)
            if kind == "field":
                if len(comps) != n:
                    raise SpecError(f"dimension mismatch: field {j} has {len(comps)} components, n={n}", ln)
                fields[j - 1] = PolyVectorField(parse_polynomial(c, n, names) for c in comps)
            else:
                if len(comps) != n - 1:
                    raise SpecError(f"dimension mismatch: map {j} has {len(comps)} components, need {n - 1}", ln)
                maps[j - 1] = PolyMap(parse_polynomial(c, n, names) for c in comps)
        except PolynomialError as exc:
            raise SpecError(str(exc), ln) from exc

    origin = [Fraction(0)] * n
    for j in range(k):
        pi, X = maps[j], fields[j]
        if pi is None and X is None:
            raise SpecError(f"neither field {j + 1} nor map {j + 1} is given")
        if pi is not None:
            ln = lines_of[("map", j + 1)]
            if any(v != 0 for v in pi.at(origin)):
                raise SpecError(f"map {j + 1} is not normalized: pi({','.join('0' * n)}) != 0", ln)
            derived = kernel_field(pi)
            if all(v == 0 for v in derived.at(origin)):
                raise SpecError(f"kernel field of map {j + 1} vanishes at 0 (not a submersion there)", ln)
            if X is None:
                fields[j] = derived
            elif not all(apply_field(X, c).is_zero() for c in pi.components):
                raise SpecError(f"field {j + 1} is not tangent to the fibers of map {j + 1}", ln)
        X = fields[j]
        if all(v == 0 for v in X.at(origin)):
            ln = lines_of.get(("field", j + 1))
            raise SpecError(f"field {j + 1} vanishes at 0", ln)

    given = {kind for kind, *_ in directives}
    mode = "fields" if given == {"field"} else "maps" if given == {"map"} else "mixed"
    return ProblemSpec(n, k, fields, maps, mode, names, eps, cap, K, seed, V, name, text)


def load_spec(ref: str) -> ProblemSpec:
    """A builtin name (``lw2``, ``lw3``, ``tao-wright``, ``heisenberg``) or a file path."""
    if ref in BUILTINS:
        text = resources.files("mlradon").joinpath("specs", BUILTINS[ref]).read_text(encoding="utf-8")
        return parse_spec(text, ref)
    path = Path(ref)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"cannot read spec {ref!r}: {exc.strerror}") from exc
    return parse_spec(text, path.stem)

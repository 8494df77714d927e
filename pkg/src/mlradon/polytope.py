"""Upward-closed Newton polytopes ``conv(generators) + R^k_{>=0}``.

All membership questions are decided by exact rational LPs (see :mod:`mlradon.lp`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import lp
from .words import Catalog, enumerate_tuples, hormander_check


class PolytopeError(ValueError):
    pass


class EmptyPolytope(PolytopeError):
    """No word tuple is nonvanishing at the base point (the Hörmander condition fails)."""


class NotSeparable(PolytopeError):
    pass


@dataclass(frozen=True)
class NewtonPolytope:
    k: int
    generators: tuple[tuple[int, ...], ...]
    minimal_generators: tuple[tuple[int, ...], ...] = field(default=())
    cap: str = ""

    @classmethod
    def from_generators(cls, gens: Iterable[Sequence[int]], k: int | None = None, cap: str = ""):
        gens = sorted({tuple(int(v) for v in g) for g in gens})
        if not gens:
            raise EmptyPolytope("a Newton polytope needs at least one generator")
        k = len(gens[0]) if k is None else k
        if any(len(g) != k or min(g) < 0 for g in gens):
            raise PolytopeError(f"generators must be non-negative integer {k}-vectors")
        return cls(k, tuple(gens), tuple(_minimal(gens)), cap)

    def __contains__(self, b):
        return contains(self, b)


def _dominates(h, g) -> bool:
    return all(a <= c for a, c in zip(h, g))


def _minimal(gens: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    # cheap componentwise pass first, then LP domination by the remaining set
    keep = [g for g in gens if not any(h != g and _dominates(h, g) for h in gens)]
    i = 0
    while i < len(keep):
        others = keep[:i] + keep[i + 1 :]
        if others and _in_hull(others, keep[i]):
            keep = others
        else:
            i += 1
    return sorted(keep)


def _as_vector(b, k) -> list[Fraction]:
    b = [Fraction(v) if not isinstance(v, float) else Fraction(repr(v)) for v in b]
    if len(b) != k:
        raise PolytopeError(f"arity mismatch: polytope has k={k}, vector has {len(b)} entries")
    return b


def _in_hull(gens, b) -> bool:
    """Is ``b`` in conv(gens) + R^k_{>=0}?  LP in the convex weights."""
    k = len(b)
    A_ub = [[g[i] for g in gens] for i in range(k)]
    A_eq = [[1] * len(gens)]
    return lp.linprog_max([0] * len(gens), A_ub, list(b), A_eq, [1]).ok


def build_polytope(cat: Catalog, point=None) -> NewtonPolytope:
    """Newton polytope of the catalog's fields at ``point`` (default: the base point)."""
    point = cat.base_point if point is None else tuple(point)
    tuples = enumerate_tuples(cat, point)
    gens = [t.degree for t in tuples if t.nonvanishing]
    if not gens:
        h = hormander_check(cat, point)
        raise EmptyPolytope(
            f"no word tuple is nonvanishing at {point} (rank {h.rank} < {cat.n}); "
            "the transform is not L^p-improving"
        )
    return NewtonPolytope.from_generators(gens, cat.k, cap=cat.describe_cap())


def contains(P: NewtonPolytope, b) -> bool:
    b = _as_vector(b, P.k)
    if any(_dominates(g, b) for g in P.minimal_generators):
        return True
    return _in_hull(P.minimal_generators, b)


def interior_margin(P: NewtonPolytope, b) -> Fraction:
    """``max t`` with ``b - t*1`` in P.  Positive iff b is interior; non-negative iff b in P."""
    b = _as_vector(b, P.k)
    gens = P.minimal_generators
    m = len(gens)
    # variables: mu_1..mu_m, t (free)
    c = [0] * m + [1]
    A_ub = [[g[i] for g in gens] + [1] for i in range(P.k)]
    A_eq = [[1] * m + [0]]
    res = lp.linprog_max(c, A_ub, b, A_eq, [1], free=[m])
    if not res.ok:
        raise PolytopeError(f"interior LP failed: {res.status}")
    return res.value


def interior_contains(P: NewtonPolytope, b) -> bool:
    return interior_margin(P, b) > 0


@dataclass(frozen=True)
class SeparatingFunctional:
    a: tuple[Fraction, ...]
    margin: Fraction  # eps with a.b <= 1 - eps and a.g >= 1 + eps

    def dot(self, v) -> Fraction:
        return sum((ai * Fraction(vi) for ai, vi in zip(self.a, v)), Fraction(0))


def separating_functional(
    P: NewtonPolytope, b, eta: Fraction = Fraction(1, 1000), min_eta: Fraction = Fraction(1, 10**9)
) -> SeparatingFunctional:
    """Positive ``a`` with ``a.b < 1 < a.g`` for every generator ``g``.

    First the largest margin ``eps*`` is found with every ``a_i >= eta``
    (``eta`` shrinks if that is infeasible).  Then, holding half that margin,
    the smallest entry of ``a`` is maximized so the functional is balanced.
    """
    b = _as_vector(b, P.k)
    if contains(P, b):
        raise NotSeparable(f"{tuple(b)} lies in the polytope; nothing to separate")
    k, gens = P.k, P.minimal_generators
    upper = Fraction(10**6)
    eps_star = None
    while eta >= min_eta:
        # variables: a_1..a_k, eps (free); a_i in [eta, upper]
        c = [0] * k + [1]
        A_ub = [list(b) + [1]]
        b_ub = [1]
        for g in gens:
            A_ub.append([-v for v in g] + [1])
            b_ub.append(-1)
        for i in range(k):
            row = [0] * (k + 1)
            row[i] = -1
            A_ub.append(row)
            b_ub.append(-eta)
            row = [0] * (k + 1)
            row[i] = 1
            A_ub.append(row)
            b_ub.append(upper)
        res = lp.linprog_max(c, A_ub, b_ub, free=[k])
        if res.ok and res.value > 0:
            eps_star = res.value
            break
        eta /= 10
    if eps_star is None:
        raise NotSeparable(f"no positive separating functional found for {tuple(b)}")

    eps = eps_star / 2
    # variables: a_1..a_k, m ; maximize m subject to a_i >= m, a_i >= eta
    c = [0] * k + [1]
    A_ub = [list(b) + [0]]
    b_ub = [1 - eps]
    for g in gens:
        A_ub.append([-v for v in g] + [0])
        b_ub.append(-(1 + eps))
    for i in range(k):
        row = [0] * (k + 1)
        row[i] = -1
        row[k] = 1
        A_ub.append(row)
        b_ub.append(0)
        row = [0] * (k + 1)
        row[i] = -1
        A_ub.append(row)
        b_ub.append(-eta)
        row = [0] * (k + 1)
        row[i] = 1
        A_ub.append(row)
        b_ub.append(upper)
    res = lp.linprog_max(c, A_ub, b_ub)
    if not res.ok:
        raise NotSeparable(f"balancing LP failed: {res.status}")
    a = tuple(res.x[:k])
    sf = SeparatingFunctional(a, eps)
    # exact post-hoc check
    if not (sf.dot(b) <= 1 - eps and all(sf.dot(g) >= 1 + eps for g in P.generators)):
        raise NotSeparable("separating functional failed verification")
    if not all(v > 0 for v in a):
        raise NotSeparable("separating functional has a non-positive entry")
    return sf


def vertices(P: NewtonPolytope) -> list[tuple[int, ...]]:
    if not P.minimal_generators:
        raise EmptyPolytope("empty polytope")
    return sorted(P.minimal_generators)


def to_text(P: NewtonPolytope) -> str:
    cap = P.cap.replace(" ", "_") or "none"
    lines = [f"k={P.k} cap={cap}"]
    lines += [" ".join(str(v) for v in g) for g in vertices(P)]
    return "\n".join(lines) + "\n"


def from_text(text: str) -> NewtonPolytope:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise PolytopeError("empty polytope file")
    header = dict(tok.split("=", 1) for tok in lines[0].split())
    if "k" not in header:
        raise PolytopeError("header must start with k=<k>")
    k = int(header["k"])
    gens = [tuple(int(v) for v in ln.split()) for ln in lines[1:]]
    cap = header.get("cap", "")
    return NewtonPolytope.from_generators(gens, k, cap="" if cap == "none" else cap.replace("_", " "))

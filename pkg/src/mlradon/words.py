"""Bracket words, the word-field catalog, and determinant catalogs.

A word ``w = (j1, ..., jd)`` names the right-normed bracket
``X_w = [...[[X_j1, X_j2], X_j3], ..., X_jd]``.  Words are plain tuples of
1-based generator indices; bracket trees are ints (leaves) or 2-tuples.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .symalg import (
    Polynomial,
    PolyVectorField,
    determinant,
    lie_bracket,
    rational_det,
    rational_rank,
)

Word = tuple[int, ...]
Degree = tuple[int, ...]
BracketTree = Union[int, tuple]

DEFAULT_MAX_LENGTH = 4
DEFAULT_TUPLE_LIMIT = 200_000


class WordError(ValueError):
    pass


class CapExceeded(WordError):
    pass


class TupleExplosion(WordError):
    def __init__(self, count: int, limit: int):
        super().__init__(
            f"about {count} word tuples to enumerate, over the limit of {limit}; lower the cap"
        )
        self.count = count
        self.limit = limit


def check_word(w: Sequence[int], k: int) -> Word:
    w = tuple(int(j) for j in w)
    if not w:
        raise WordError("words are nonempty")
    bad = [j for j in w if not 1 <= j <= k]
    if bad:
        raise WordError(f"letter {bad[0]} out of range 1..{k}")
    return w


def word_degree(w: Sequence[int], k: int) -> Degree:
    w = check_word(w, k)
    counts = [0] * k
    for j in w:
        counts[j - 1] += 1
    return tuple(counts)


def tuple_degree(words: Sequence[Word], k: int) -> Degree:
    total = [0] * k
    for w in words:
        for j, c in enumerate(word_degree(w, k)):
            total[j] += c
    return tuple(total)


def word_key(w: Word):
    """Graded-lex order: shorter words first, then lexicographic."""
    return (len(w), w)


def tuple_key(words: Sequence[Word]):
    concat = tuple(itertools.chain.from_iterable(words))
    return (len(concat), concat, tuple(len(w) for w in words))


# bracket-tree expansion


def _right_bracket(comb: dict[Word, int], tree: BracketTree) -> dict[Word, int]:
    # [A, leaf j] = A appended with j; [A, [B1, B2]] = [[A, B1], B2] - [[A, B2], B1]
    if isinstance(tree, int):
        return {w + (tree,): c for w, c in comb.items()}
    left, right = tree
    first = _right_bracket(_right_bracket(comb, left), right)
    second = _right_bracket(_right_bracket(comb, right), left)
    out = dict(first)
    for w, c in second.items():
        out[w] = out.get(w, 0) - c
    return {w: c for w, c in out.items() if c}


def expand_bracket(tree: BracketTree) -> list[tuple[int, Word]]:
    """Write an iterated bracket as an integer combination of right-normed words.

    >>> expand_bracket(((1, 2), (3, 4)))
    [(1, (1, 2, 3, 4)), (-1, (1, 2, 4, 3))]
    """
    if isinstance(tree, int):
        if tree < 1:
            raise WordError(f"leaf {tree} is not a generator index")
        return [(1, (tree,))]
    if not (isinstance(tree, tuple) and len(tree) == 2):
        raise WordError(f"bracket trees are ints or pairs, got {tree!r}")
    left, right = tree
    comb = {w: c for c, w in expand_bracket(left)}
    _check_leaves(right)
    out = _right_bracket(comb, right)
    return sorted(((c, w) for w, c in out.items() if c), key=lambda cw: word_key(cw[1]))


def _check_leaves(tree):
    if isinstance(tree, int):
        if tree < 1:
            raise WordError(f"leaf {tree} is not a generator index")
        return
    if not (isinstance(tree, tuple) and len(tree) == 2):
        raise WordError(f"bracket trees are ints or pairs, got {tree!r}")
    _check_leaves(tree[0])
    _check_leaves(tree[1])


def bracket_tree_field(tree: BracketTree, fields: Sequence[PolyVectorField]) -> PolyVectorField:
    """Direct symbolic evaluation of a bracket tree (independent of the word recursion)."""
    if isinstance(tree, int):
        return fields[tree - 1]
    return lie_bracket(bracket_tree_field(tree[0], fields), bracket_tree_field(tree[1], fields))


# the catalog


class Catalog:
    """Generators plus a memo of word fields, truncated at ``max_length``.

    ``eps`` sets the per-letter tuple cap ``ceil(d / eps)``, where ``d`` is the
    total degree of the lowest-degree tuple that is nonvanishing at the base
    point.  Pass ``letter_cap`` to fix it explicitly.
    """

    def __init__(
        self,
        fields: Sequence[PolyVectorField],
        max_length: int = DEFAULT_MAX_LENGTH,
        eps: Fraction | float = Fraction(1, 4),
        letter_cap: int | None = None,
        base_point: Sequence | None = None,
        tuple_limit: int = DEFAULT_TUPLE_LIMIT,
    ):
        fields = list(fields)
        if not fields:
            raise WordError("empty catalog: at least one generator field is needed")
        n = fields[0].n
        if any(f.n != n for f in fields):
            raise WordError("generator fields live in different dimensions")
        if max_length < 1:
            raise WordError("max_length must be at least 1")
        self.fields = tuple(fields)
        self.k = len(fields)
        self.n = n
        self.max_length = max_length
        self.eps = Fraction(eps) if not isinstance(eps, float) else Fraction(repr(eps))
        self.tuple_limit = tuple_limit
        self.base_point = tuple(base_point) if base_point is not None else (0,) * n
        self._letter_cap = letter_cap
        self._cache: dict[Word, PolyVectorField] = {(j + 1,): f for j, f in enumerate(fields)}

    def word_field(self, w: Sequence[int]) -> PolyVectorField:
        w = check_word(w, self.k)
        if len(w) > self.max_length:
            raise CapExceeded(f"word {w} is longer than the cap {self.max_length}")
        if w not in self._cache:
            self._cache[w] = lie_bracket(self.word_field(w[:-1]), self.fields[w[-1] - 1])
        return self._cache[w]

    def with_cap(self, max_length: int) -> "Catalog":
        return Catalog(
            self.fields, max_length, self.eps, self._letter_cap, self.base_point, self.tuple_limit
        )

    @cached_property
    def words(self) -> tuple[Word, ...]:
        """All words up to the cap with a nonzero field, in graded-lex order.

        A zero field has only zero extensions, so those branches are pruned.
        """
        out = []
        frontier = [(j,) for j in range(1, self.k + 1)]
        while frontier:
            nxt = []
            for w in frontier:
                if self.word_field(w).is_zero():
                    continue
                out.append(w)
                if len(w) < self.max_length:
                    nxt.extend(w + (j,) for j in range(1, self.k + 1))
            frontier = nxt
        return tuple(sorted(out, key=word_key))

    @cached_property
    def letter_cap(self) -> int | None:
        if self._letter_cap is not None:
            return self._letter_cap
        d = spanning_degree(self, self.base_point)
        if d is None:
            return None
        return math.ceil(Fraction(d) / self.eps)

    def describe_cap(self) -> str:
        return f"length<={self.max_length} letter<={self.letter_cap}"


def spanning_degree(cat: Catalog, point) -> int | None:
    """Smallest total degree of a word tuple whose determinant is nonzero at ``point``."""
    values = _exact_values(cat, point)
    best = None
    for combo in itertools.combinations(cat.words, cat.n):
        d = sum(len(w) for w in combo)
        if best is not None and d >= best:
            continue
        if rational_det([values[w] for w in combo]):
            best = d
    return best


def _exact_values(cat: Catalog, point) -> dict[Word, list]:
    if len(point) != cat.n:
        raise WordError(f"point has dimension {len(point)}, fields live in R^{cat.n}")
    return {w: cat.word_field(w).at(point) for w in cat.words}


@dataclass
class WordTuple:
    words: tuple[Word, ...]
    degree: Degree
    value: Fraction | float
    catalog: Catalog = field(repr=False, compare=False)

    @property
    def nonvanishing(self) -> bool:
        return self.value != 0

    @cached_property
    def lam(self) -> Polynomial:
        """The symbolic determinant of the word fields."""
        return determinant([self.catalog.word_field(w) for w in self.words])

    def label(self) -> str:
        return "(" + ",".join("(" + ",".join(map(str, w)) + ")" for w in self.words) + ")"


def count_tuples(cat: Catalog) -> int:
    return math.comb(len(cat.words), cat.n)


def enumerate_tuples(cat: Catalog, point=None) -> list[WordTuple]:
    """All n-tuples of distinct catalog words within the caps, with ``lambda_I(point)``.

    Each tuple is kept once, in sorted word order; permuting the words only
    flips the determinant's sign.
    """
    point = cat.base_point if point is None else tuple(point)
    count = count_tuples(cat)
    if count > cat.tuple_limit:
        raise TupleExplosion(count, cat.tuple_limit)
    exact = all(isinstance(v, (int, Fraction)) for v in point)
    if exact:
        values = _exact_values(cat, point)
    else:
        pts = np.asarray(point, dtype=float)[None, :]
        values = {w: cat.word_field(w).evaluate_many(pts)[0] for w in cat.words}
    cap = cat.letter_cap
    out = []
    for combo in itertools.combinations(cat.words, cat.n):
        deg = tuple_degree(combo, cat.k)
        if cap is not None and max(deg) > cap:
            continue
        cols = [values[w] for w in combo]
        if exact:
            # rows of the determinant matrix are the fields; det is transpose-invariant
            val = rational_det(cols)
        else:
            val = float(np.linalg.det(np.array(cols, dtype=float)))
        out.append(WordTuple(combo, deg, val, cat))
    out.sort(key=lambda t: tuple_key(t.words))
    return out


@dataclass
class HormanderResult:
    spans: bool
    rank: int
    witness: tuple[Word, ...]
    cap: str

    def __str__(self):
        words = " ".join("(" + ",".join(map(str, w)) + ")" for w in self.witness)
        status = "spans" if self.spans else f"fails (rank {self.rank})"
        return f"{status}; witness {words}; {self.cap}"


def hormander_check(cat: Catalog, point=None) -> HormanderResult:
    """Exact rank test of the word fields at ``point`` (truncated at the catalog cap)."""
    point = cat.base_point if point is None else tuple(point)
    values = _exact_values(cat, point)
    rank, idx = rational_rank([values[w] for w in cat.words])
    witness = tuple(cat.words[i] for i in idx)
    return HormanderResult(rank == cat.n, rank, witness, f"cap: word length <= {cat.max_length}")


@dataclass
class LambdaVector:
    x0: tuple
    delta: tuple[float, ...]
    K: float
    entries: dict[tuple[Word, ...], float]
    norm: float
    argmax: WordTuple

    def __len__(self):
        return len(self.entries)


def scale_factor(delta: Sequence[float], K: float, deg: Sequence[int]) -> float:
    out = 1.0
    for d, e in zip(delta, deg):
        out *= (K * d) ** e
    return out


def lambda_vector(cat: Catalog, x0, delta: Sequence[float], K: float = 1.0) -> LambdaVector:
    """Entries ``(K delta)^deg(I) * lambda_I(x0)`` and their sup-norm.

    The argmax tuple (smallest in graded-lex order among ties) is the chart
    tuple used by :func:`mlradon.flows.chart.phi_chart`.
    """
    delta = tuple(float(d) for d in delta)
    if len(delta) != cat.k or any(d <= 0 for d in delta):
        raise WordError("delta needs k positive entries")
    if K < 1:
        raise WordError("K must be at least 1")
    tuples = enumerate_tuples(cat, x0)
    if not tuples:
        raise WordError("no word tuples within the caps")
    entries = {}
    best, best_val = None, -1.0
    for t in tuples:
        v = scale_factor(delta, K, t.degree) * float(t.value)
        entries[t.words] = v
        # strict comparison with a relative guard keeps the first (smallest) argmax on ties
        if abs(v) > best_val * (1 + 1e-12):
            best, best_val = t, abs(v)
    return LambdaVector(tuple(x0), delta, float(K), entries, best_val, best)


def lambda_norm_many(
    cat: Catalog, tuples: Sequence[WordTuple], pts: np.ndarray, delta, K: float = 1.0
) -> np.ndarray:
    """Sup-norm of the Lambda vector at many points (float evaluation)."""
    pts = np.asarray(pts, dtype=float)
    words = sorted({w for t in tuples for w in t.words}, key=word_key)
    vals = {w: cat.word_field(w).evaluate_many(pts) for w in words}
    out = np.zeros(pts.shape[0])
    for t in tuples:
        mat = np.stack([vals[w] for w in t.words], axis=-1)
        out = np.maximum(out, abs(scale_factor(delta, K, t.degree)) * np.abs(np.linalg.det(mat)))
    return out

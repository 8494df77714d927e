from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mlradon.symalg import PolyVectorField, determinant, lie_bracket, random_field
from mlradon.words import (
    CapExceeded,
    Catalog,
    TupleExplosion,
    WordError,
    bracket_tree_field,
    enumerate_tuples,
    expand_bracket,
    hormander_check,
    lambda_vector,
    tuple_degree,
    word_degree,
)


def F(*comps):
    return PolyVectorField.from_strings(list(comps))


LW = [F("1", "0"), F("0", "1")]
TW = [F("1", "0"), F("1", "x1")]
HEIS = [F("1", "0", "0"), F("0", "1", "x1")]

trees = st.recursive(
    st.integers(1, 4),
    lambda kids: st.tuples(kids, kids),
    max_leaves=5,
)


def test_degrees():
    assert word_degree((1, 2, 1), 2) == (2, 1)
    assert word_degree((3,), 3) == (0, 0, 1)
    assert tuple_degree([(1,), (1, 2)], 2) == (2, 1)


@given(st.permutations([1, 2, 3, 4, 4, 2]))
def test_degree_is_permutation_invariant(w):
    assert word_degree(tuple(w), 4) == (1, 2, 1, 2)


def test_word_validation():
    with pytest.raises(WordError):
        word_degree((0, 1), 2)
    with pytest.raises(WordError):
        word_degree((), 2)


def test_word_fields_are_right_normed():
    rng = np.random.default_rng(3)
    gens = [random_field(rng, 2, 2) for _ in range(3)]
    cat = Catalog(gens, max_length=3)
    assert cat.word_field((1, 2)) == lie_bracket(gens[0], gens[1])
    assert cat.word_field((1, 2, 3)) == lie_bracket(lie_bracket(gens[0], gens[1]), gens[2])


def test_hand_words():
    cat = Catalog(TW, max_length=3)
    assert cat.word_field((1, 2)) == F("0", "1")
    assert cat.word_field((1, 2, 2)).is_zero()
    with pytest.raises(CapExceeded):
        cat.word_field((1, 2, 1, 2))


def test_catalog_prunes_zero_words():
    cat = Catalog(TW, max_length=4)
    assert cat.words == ((1,), (2,), (1, 2), (2, 1))


def test_expand_golden_identity():
    assert expand_bracket(((1, 2), (3, 4))) == [(1, (1, 2, 3, 4)), (-1, (1, 2, 4, 3))]
    assert expand_bracket(3) == [(1, (3,))]
    assert expand_bracket(((1, 2), 3)) == [(1, (1, 2, 3))]


@given(trees.filter(lambda t: isinstance(t, tuple)), st.integers(0, 1000))
def test_expansion_agrees_with_direct_bracket(tree, seed):
    rng = np.random.default_rng(seed)
    gens = [random_field(rng, 2, 2, n_terms=2) for _ in range(4)]
    cat = Catalog(gens, max_length=5)
    combo = PolyVectorField.coordinate(2, 1) * 0
    for c, w in expand_bracket(tree):
        combo = combo + cat.word_field(w) * c
    assert combo == bracket_tree_field(tree, gens)


def test_lw_tuples():
    tuples = enumerate_tuples(Catalog(LW, max_length=2))
    first = tuples[0]
    assert first.words == ((1,), (2,)) and first.value == 1 and first.degree == (1, 1)


def test_tao_wright_tuples():
    degs = {t.degree for t in enumerate_tuples(Catalog(TW, max_length=3)) if t.nonvanishing}
    assert {(2, 1), (1, 2)} <= degs


def test_repeated_word_has_zero_lambda():
    cat = Catalog(TW, max_length=2)
    X = cat.word_field((1, 2))
    assert determinant([X, X]).is_zero()


def test_letter_cap_filters():
    cat = Catalog(TW, max_length=4, letter_cap=1)
    assert all(max(t.degree) <= 1 for t in enumerate_tuples(cat))
    assert Catalog(TW, max_length=4, eps=Fraction(1, 4)).letter_cap == 12  # ceil(3 / (1/4))


def test_tuple_explosion_guard():
    rng = np.random.default_rng(0)
    gens = [random_field(rng, 3, 2) for _ in range(3)]
    with pytest.raises(TupleExplosion):
        enumerate_tuples(Catalog(gens, max_length=3, tuple_limit=10))


@pytest.mark.parametrize(
    "fields, spans, rank, witness",
    [
        (LW, True, 2, ((1,), (2,))),
        ([F("1", "0"), F("1", "0")], False, 1, ((1,),)),
        (HEIS, True, 3, ((1,), (2,), (1, 2))),
    ],
)
def test_hormander(fields, spans, rank, witness):
    res = hormander_check(Catalog(fields))
    assert (res.spans, res.rank, res.witness) == (spans, rank, witness)


def test_lambda_lw():
    lam = lambda_vector(Catalog(LW), (0, 0), (0.1, 0.1))
    assert lam.entries[((1,), (2,))] == pytest.approx(0.01)
    assert lam.norm == pytest.approx(0.01)
    assert lam.argmax.words == ((1,), (2,))


@given(st.floats(0.01, 0.3), st.floats(0.01, 0.3))
def test_lambda_tao_wright(d1, d2):
    lam = lambda_vector(Catalog(TW), (0, 0), (d1, d2))
    assert lam.norm == pytest.approx(max(d1**2 * d2, d1 * d2**2), rel=1e-12)


@given(st.floats(0.05, 0.3), st.floats(0.05, 0.3), st.floats(0.2, 3.0))
def test_lambda_homogeneity(d1, d2, t):
    cat = Catalog(HEIS)
    a = lambda_vector(cat, (0, 0, 0), (d1, d2))
    b = lambda_vector(cat, (0, 0, 0), (t * d1, t * d2))
    for words, v in a.entries.items():
        deg = tuple_degree(words, 2)
        assert b.entries[words] == pytest.approx(t ** sum(deg) * v, rel=1e-9, abs=1e-300)


def test_lambda_argmax_tie_prefers_first():
    # both Tao-Wright generators tie when delta1 == delta2
    lam = lambda_vector(Catalog(TW), (0, 0), (0.1, 0.1))
    tied = [w for w, v in lam.entries.items() if abs(v) == pytest.approx(lam.norm)]
    assert lam.argmax.words == tied[0]


def test_lambda_rejects_bad_delta():
    with pytest.raises(WordError):
        lambda_vector(Catalog(LW), (0, 0), (0.1,))
    with pytest.raises(WordError):
        lambda_vector(Catalog(LW), (0, 0), (0.1, 0.1), K=0.5)

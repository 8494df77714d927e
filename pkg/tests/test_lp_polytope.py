import itertools
from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from mlradon.lp import INFEASIBLE, OPTIMAL, UNBOUNDED, feasible, linprog_max
from mlradon.polytope import (
    EmptyPolytope,
    NewtonPolytope,
    NotSeparable,
    PolytopeError,
    contains,
    from_text,
    interior_contains,
    interior_margin,
    separating_functional,
    to_text,
    vertices,
)

TW = NewtonPolytope.from_generators([(2, 1), (1, 2)])
LW = NewtonPolytope.from_generators([(1, 1)])


# ---- exact LP ----------------------------------------------------------------


def test_lp_textbook():
    # max 3x + 5y; x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
    res = linprog_max([3, 5], A_ub=[[1, 0], [0, 2], [3, 2]], b_ub=[4, 12, 18])
    assert res.status == OPTIMAL and res.value == 36 and res.x == [2, 6]


def test_lp_infeasible_and_unbounded():
    assert linprog_max([1], A_ub=[[1]], b_ub=[-1]).status == INFEASIBLE
    assert linprog_max([1, 0], A_ub=[[-1, 1]], b_ub=[0]).status == UNBOUNDED


def test_lp_free_and_equality():
    # max -x with x free and x = -5/2
    res = linprog_max([-1], A_eq=[[1]], b_eq=[Fraction(-5, 2)], free=[0])
    assert res.x == [Fraction(-5, 2)] and res.value == Fraction(5, 2)


def test_lp_degenerate_cycling_example():
    # Beale's example cycles under the textbook rule; Bland's rule terminates
    c = [Fraction(3, 4), -150, Fraction(1, 50), -6]
    A = [[Fraction(1, 4), -60, Fraction(-1, 25), 9], [Fraction(1, 2), -90, Fraction(-1, 50), 3], [0, 0, 1, 0]]
    res = linprog_max(c, A_ub=A, b_ub=[0, 0, 1])
    assert res.status == OPTIMAL and res.value == Fraction(1, 20)


def test_feasible():
    assert feasible(A_ub=[[1, 1]], b_ub=[1], nvars=2).ok
    assert not feasible(A_eq=[[1, 1]], b_eq=[-1], nvars=2).ok


# ---- membership oracle: half-spaces from candidate facet normals ---------------


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _normals(gens, k):
    """Nonnegative normals of every hyperplane spanned by generators and coordinate rays."""
    unit = [tuple(int(i == j) for i in range(k)) for j in range(k)]
    out = set(unit)
    if k == 2:
        for g, h in itertools.combinations(gens, 2):
            out.add((h[1] - g[1], g[0] - h[0]))
    if k == 3:
        for g, h, m in itertools.combinations(gens, 3):
            out.add(_cross([a - b for a, b in zip(h, g)], [a - b for a, b in zip(m, g)]))
        for g, h in itertools.combinations(gens, 2):
            for e in unit:
                out.add(_cross([a - b for a, b in zip(h, g)], e))
    good = set()
    for a in out:
        if all(v <= 0 for v in a):
            a = tuple(-v for v in a)
        if all(v >= 0 for v in a) and any(a):
            good.add(a)
    return good


def oracle_contains(gens, b):
    k = len(b)
    return all(
        sum(ai * bi for ai, bi in zip(a, b)) >= min(sum(ai * gi for ai, gi in zip(a, g)) for g in gens)
        for a in _normals(gens, k)
    )


def gens_strategy(k):
    return st.lists(st.tuples(*[st.integers(0, 4)] * k), min_size=1, max_size=5, unique=True)


def b_strategy(k):
    return st.tuples(*[st.fractions(min_value=0, max_value=5, max_denominator=4)] * k)


@pytest.mark.parametrize("k", [1, 2, 3])
@given(data=st.data())
def test_contains_matches_halfspace_oracle(k, data):
    gens = data.draw(gens_strategy(k))
    b = data.draw(b_strategy(k))
    P = NewtonPolytope.from_generators(gens)
    assert contains(P, b) == oracle_contains(gens, b)


@given(gens_strategy(2), b_strategy(2), st.tuples(*[st.fractions(0, 2, max_denominator=3)] * 2))
def test_upward_closed(gens, b, shift):
    P = NewtonPolytope.from_generators(gens)
    assume(contains(P, b))
    assert contains(P, tuple(x + s for x, s in zip(b, shift)))


@given(gens_strategy(3), b_strategy(3), b_strategy(3))
def test_convex(gens, b1, b2):
    P = NewtonPolytope.from_generators(gens)
    assume(contains(P, b1) and contains(P, b2))
    assert contains(P, tuple((x + y) / 2 for x, y in zip(b1, b2)))


@given(gens_strategy(2))
def test_generators_are_members(gens):
    P = NewtonPolytope.from_generators(gens)
    assert all(contains(P, g) for g in gens)


def test_contains_examples():
    assert contains(TW, (2, 1))
    assert contains(TW, (Fraction(3, 2), Fraction(3, 2)))
    assert not contains(LW, (1, Fraction(1, 2)))


def test_interior_margin_examples():
    assert interior_margin(TW, (2, 2)) == Fraction(1, 2)
    assert interior_margin(TW, (2, 1)) == 0
    assert interior_margin(LW, (1, 1)) == 0
    assert not interior_contains(TW, (2, 1))
    assert interior_contains(TW, (2, 2))
    assert interior_margin(LW, (Fraction(1, 2), 1)) < 0


@given(gens_strategy(2), b_strategy(2))
def test_interior_implies_contains(gens, b):
    P = NewtonPolytope.from_generators(gens)
    t = interior_margin(P, b)
    assert (t >= 0) == contains(P, b)


def test_minimal_generators():
    assert NewtonPolytope.from_generators([(1, 1), (2, 2)]).minimal_generators == ((1, 1),)
    assert NewtonPolytope.from_generators([(2, 1), (1, 2), (2, 2)]).minimal_generators == ((1, 2), (2, 1))
    assert NewtonPolytope.from_generators([(3, 0)]).minimal_generators == ((3, 0),)
    # (2,2) is not dominated by a generator but sits above the segment (1,3)-(3,1)
    assert vertices(NewtonPolytope.from_generators([(1, 3), (3, 1), (2, 2)])) == [(1, 3), (3, 1)]


@given(gens_strategy(3), b_strategy(3))
def test_minimal_generators_define_same_set(gens, b):
    P = NewtonPolytope.from_generators(gens)
    Q = NewtonPolytope.from_generators(P.minimal_generators)
    assert contains(P, b) == contains(Q, b)


def test_empty_polytope():
    with pytest.raises(EmptyPolytope):
        NewtonPolytope.from_generators([])


def _check_separation(P, b, sf):
    assert all(a > 0 for a in sf.a)
    assert sf.dot(b) <= 1 - sf.margin < 1
    assert all(sf.dot(g) >= 1 + sf.margin for g in P.minimal_generators)


def test_separating_functional_examples():
    b = (Fraction(2, 5), Fraction(2, 5))
    sf = separating_functional(LW, b)
    _check_separation(LW, b, sf)
    # the hand-made functional (9/10, 9/10) also separates
    assert Fraction(9, 10) * Fraction(4, 5) < 1 < Fraction(9, 5)
    _check_separation(TW, (1, 1), separating_functional(TW, (1, 1)))
    assert separating_functional(LW, (Fraction(1, 2), Fraction(1, 2))).a == (Fraction(5, 6), Fraction(5, 6))


def test_separating_functional_rejects_members():
    with pytest.raises(NotSeparable):
        separating_functional(TW, (2, 2))


@given(gens_strategy(2), b_strategy(2))
def test_separating_functional_property(gens, b):
    P = NewtonPolytope.from_generators(gens)
    assume(not contains(P, b))
    assume(all(v > 0 for v in b))
    _check_separation(P, b, separating_functional(P, b))


@given(gens_strategy(3), st.lists(b_strategy(3), min_size=5, max_size=5))
def test_text_roundtrip(gens, bs):
    P = NewtonPolytope.from_generators(gens, cap="length<=4 letter<=12")
    Q = from_text(to_text(P))
    assert Q.minimal_generators == P.minimal_generators and Q.cap == P.cap
    assert [contains(P, b) for b in bs] == [contains(Q, b) for b in bs]


def test_from_text_errors():
    with pytest.raises(PolytopeError):
        from_text("")
    with pytest.raises(PolytopeError):
        from_text("cap=x\n1 1\n")
    with pytest.raises(PolytopeError):
        from_text("k=2\n1 1 1\n")

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mlradon.flows import FlowConfig, flow
from mlradon.symalg import (
    Polynomial,
    PolynomialError,
    PolyMap,
    PolyVectorField,
    apply_field,
    determinant,
    evaluate,
    kernel_field,
    lie_bracket,
    parse_polynomial,
    partial_derivative,
    random_field,
    rational_det,
    rational_rank,
)


def P(text, n=2):
    return parse_polynomial(text, n)


def F(*comps):
    return PolyVectorField.from_strings(list(comps))


exponents = st.tuples(*[st.integers(0, 3)] * 3).filter(lambda e: sum(e) <= 3)
polys = st.dictionaries(exponents, st.fractions(min_value=-5, max_value=5, max_denominator=6), max_size=5).map(
    lambda d: Polynomial(3, d)
)
fields = st.tuples(polys, polys, polys).map(PolyVectorField)
points = st.tuples(*[st.fractions(min_value=-3, max_value=3, max_denominator=4)] * 3)


class TestPolynomial:
    def test_partials(self):
        assert partial_derivative(P("x1^2*x2"), 1) == P("2*x1*x2")
        assert partial_derivative(P("x1"), 2).is_zero()
        assert partial_derivative(P("x1 + 3/2*x1*x2"), 1) == P("1 + 3/2*x2")

    def test_evaluate_exact(self):
        assert evaluate(P("x1*x2"), (2, 3)) == 6
        assert evaluate(P("x1^2 - x2"), (Fraction(1, 2), Fraction(1, 4))) == 0
        assert isinstance(evaluate(P("x1/3"), (1, 0)), Fraction)

    @given(polys)
    def test_value_at_origin_is_constant_term(self, p):
        assert evaluate(p, (0, 0, 0)) == p.constant_term()

    def test_parse_syntax(self):
        p = P("2/3*x1^2*x2 - x2 + 1")
        assert p.terms == {(2, 1): Fraction(2, 3), (0, 1): -1, (0, 0): 1}
        assert P("2x1") == P("2*x1")
        assert P("3/2x1*x2") == P("3/2*x1*x2")
        assert P("x1^2") == P("x1**2")
        assert P("(x1 + x2)**2") == P("x1^2 + 2*x1*x2 + x2^2")

    @pytest.mark.parametrize("bad", ["x3", "x1/x2", "x1^x2", "x1^-1", "", "x1 +", "sin(x1)", "1/0"])
    def test_parse_rejects(self, bad):
        with pytest.raises(PolynomialError):
            P(bad)

    @given(polys)
    def test_format_parse_roundtrip(self, p):
        assert parse_polynomial(str(p), 3) == p

    @given(polys, polys, points)
    def test_ring_ops_commute_with_evaluation(self, p, q, x):
        assert evaluate(p * q - p + q, x) == evaluate(p, x) * evaluate(q, x) - evaluate(p, x) + evaluate(q, x)

    @given(polys, st.lists(st.tuples(*[st.floats(-2, 2)] * 3), min_size=1, max_size=5))
    def test_numeric_evaluation_agrees(self, p, pts):
        pts = np.array(pts)
        exact = [float(evaluate(p, [Fraction(v) for v in row])) for row in pts]
        np.testing.assert_allclose(p.evaluate_many(pts), exact, rtol=1e-9, atol=1e-9)


class TestBracket:
    def test_constant_fields_commute(self):
        assert lie_bracket(F("1", "0"), F("0", "1")).is_zero()

    def test_hand_example(self):
        assert lie_bracket(F("1", "0"), F("1", "x1")) == F("0", "1")

    def test_bracket_matches_flow_commutator(self):
        # e^{-sY} e^{-sX} e^{sY} e^{sX} x = x + s^2 [X,Y](x) + O(s^3)
        X, Y = F("1", "x2"), F("x1*x2", "1")
        x0 = np.array([0.3, -0.2])
        cfg = FlowConfig(steps_per_unit=2048)
        s = 1e-2
        x = x0
        for V, t in ((X, s), (Y, s), (X, -s), (Y, -s)):
            x = flow(V, x, t, cfg)
        approx = (x - x0) / s**2
        exact = lie_bracket(X, Y).evaluate_many(x0[None, :])[0]
        np.testing.assert_allclose(approx, exact, atol=0.05)

    @given(fields, fields)
    def test_antisymmetry(self, X, Y):
        assert (lie_bracket(X, Y) + lie_bracket(Y, X)).is_zero()

    @given(fields, fields, fields)
    def test_jacobi(self, X, Y, Z):
        total = lie_bracket(X, lie_bracket(Y, Z)) + lie_bracket(Y, lie_bracket(Z, X)) + lie_bracket(Z, lie_bracket(X, Y))
        assert total.is_zero()

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            lie_bracket(F("1", "0"), F("1", "0", "0"))


class TestKernelAndDeterminant:
    def test_coordinate_projection(self):
        X = kernel_field(PolyMap.from_strings(["x1"], 2))
        assert X in (F("0", "1"), F("0", "-1"))

    def test_curve_family(self):
        # pi(x1,x2,t) = (x1 - t, x2 - t^2); the third variable plays t
        X = kernel_field(PolyMap.from_strings(["x1 - x3", "x2 - x3^2"], 3))
        want = PolyVectorField.from_strings(["1", "2*x3", "1"])
        assert X in (want, -want)

    @given(st.integers(0, 10_000))
    def test_kernel_annihilated(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 5))
        pi = PolyMap(random_field(rng, n, 2).components[: n - 1])
        X = kernel_field(pi)
        assert all(apply_field(X, c).is_zero() for c in pi.components)

    def test_determinants(self):
        assert determinant([F("1", "0"), F("0", "1")]) == P("1")
        assert determinant([F("1", "0"), F("1", "x1")]) == P("x1")
        X = F("x1", "x2^2")
        assert determinant([X, X]).is_zero()

    @given(st.integers(0, 10_000))
    def test_symbolic_det_matches_numeric(self, seed):
        rng = np.random.default_rng(seed)
        fs = [random_field(rng, 3, 2) for _ in range(3)]
        x = rng.uniform(-1, 1, 3)
        num = np.linalg.det(np.stack([f.evaluate_many(x[None, :])[0] for f in fs]))
        assert determinant(fs).evaluate_many(x[None, :])[0] == pytest.approx(num, abs=1e-8)

    def test_rational_rank_and_det(self):
        rows = [[1, 2, 3], [2, 4, 6], [0, 1, 1]]
        rank, idx = rational_rank([[Fraction(v) for v in r] for r in rows])
        assert rank == 2 and idx == [0, 2]
        assert rational_det([[Fraction(1, 2), 1], [1, 4]]) == 1

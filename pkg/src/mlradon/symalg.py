"""Exact polynomial algebra over the rationals and polynomial vector-field calculus.

Polynomials are sparse maps from exponent multi-indices to ``Fraction``
coefficients.  Vector fields are tuples of polynomials (component ``i`` is the
coefficient of the ``i``-th coordinate derivative).  Everything here is
immutable; numerical evaluation over numpy arrays is provided for the flow
integrators.
"""

from __future__ import annotations

import ast
import itertools
import re
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

Exponent = tuple[int, ...]


class PolynomialError(ValueError):
    pass


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, np.integer)):
        return Fraction(int(c))
    if isinstance(c, str):
        return Fraction(c)
    if isinstance(c, float):
        return Fraction(repr(c))
    raise TypeError(f"cannot convert {c!r} to an exact rational")


def _grlex_key(e: Exponent):
    return (sum(e), e)


class Polynomial:
    """Sparse multivariate polynomial with exact rational coefficients."""

    def __init__(self, nvars: int, terms: Mapping[Exponent, object] | None = None):
        if nvars < 0:
            raise PolynomialError("variable count must be non-negative")
        self.nvars = nvars
        clean: dict[Exponent, Fraction] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(v) for v in e)
            if len(e) != nvars or any(v < 0 for v in e):
                raise PolynomialError(f"bad exponent {e} for {nvars} variables")
            c = _as_fraction(c)
            if c:
                clean[e] = clean.get(e, Fraction(0)) + c
                if not clean[e]:
                    del clean[e]
        self._terms = clean

    # construction helpers

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, c) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "Polynomial":
        """The coordinate ``x_i`` (1-based)."""
        if not 1 <= i <= nvars:
            raise PolynomialError(f"variable index {i} out of range 1..{nvars}")
        e = [0] * nvars
        e[i - 1] = 1
        return cls(nvars, {tuple(e): 1})

    @property
    def terms(self) -> dict[Exponent, Fraction]:
        return dict(self._terms)

    def items(self):
        """Terms in graded-lex order, highest first."""
        return sorted(self._terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.nvars, Fraction(0))

    # arithmetic

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise PolynomialError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        return Polynomial.constant(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return Polynomial(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = _as_fraction(other)
            return Polynomial(self.nvars, {e: c * v for e, v in self._terms.items()})
        other = self._coerce(other)
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = _as_fraction(other)
        if not c:
            raise ZeroDivisionError("polynomial divided by zero")
        return self * (1 / c)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise PolynomialError("only non-negative integer powers are supported")
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        try:
            return self == Polynomial.constant(self.nvars, other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self._terms.items())))

    # calculus and evaluation

    def partial(self, i: int) -> "Polynomial":
        return partial_derivative(self, i)

    def __call__(self, x):
        return evaluate(self, x)

    @cached_property
    def _numeric(self):
        items = self.items()
        exps = np.array([e for e, _ in items], dtype=np.int64).reshape(len(items), self.nvars)
        coef = np.array([float(c) for _, c in items], dtype=float)
        return exps, coef

    def evaluate_many(self, pts: np.ndarray) -> np.ndarray:
        """Float evaluation at each row of ``pts`` (shape ``(m, n)``)."""
        pts = np.asarray(pts, dtype=float)
        exps, coef = self._numeric
        if not len(coef):
            return np.zeros(pts.shape[0])
        mono = np.ones((pts.shape[0], len(coef)))
        for v in range(self.nvars):
            col = exps[:, v]
            if col.any():
                mono *= pts[:, v : v + 1] ** col[None, :]
        return mono @ coef

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({self.nvars}, {str(self)!r})"


def partial_derivative(p: Polynomial, i: int) -> Polynomial:
    """Formal derivative with respect to ``x_i`` (1-based)."""
    if not 1 <= i <= p.nvars:
        raise PolynomialError(f"variable index {i} out of range 1..{p.nvars}")
    k = i - 1
    out = {}
    for e, c in p._terms.items():
        if e[k]:
            d = list(e)
            d[k] -= 1
            out[tuple(d)] = c * e[k]
    return Polynomial(p.nvars, out)


def evaluate(p: Polynomial, x: Sequence):
    """Evaluate at a point; exact if every coordinate is an int or Fraction."""
    if len(x) != p.nvars:
        raise PolynomialError(f"point has dimension {len(x)}, polynomial has {p.nvars} variables")
    exact = all(isinstance(v, (int, Fraction, np.integer)) for v in x)
    if exact:
        x = [Fraction(int(v)) if not isinstance(v, Fraction) else v for v in x]
        total = Fraction(0)
    else:
        x = [float(v) for v in x]
        total = 0.0
    for e, c in p._terms.items():
        term = c if exact else float(c)
        for v, a in zip(x, e):
            if a:
                term *= v**a
        total += term
    return total


def format_polynomial(p: Polynomial, names: Sequence[str] | None = None) -> str:
    names = names or [f"x{i + 1}" for i in range(p.nvars)]
    if p.is_zero():
        return "0"
    parts = []
    for e, c in p.items():
        mono = "*".join(
            names[v] if a == 1 else f"{names[v]}^{a}" for v, a in enumerate(e) if a
        )
        mag = abs(c)
        if mono:
            body = mono if mag == 1 else f"{mag}*{mono}"
        else:
            body = str(mag)
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def parse_polynomial(text: str, nvars: int, names: Sequence[str] | None = None) -> Polynomial:
    """Parse text such as ``2/3*x1^2*x3 - x2 + 1``.

    ``^`` and ``**`` both denote powers; division is only allowed by constants.
    """
    names = list(names) if names is not None else [f"x{i + 1}" for i in range(nvars)]
    if len(names) != nvars:
        raise PolynomialError("variable name list does not match the variable count")
    lookup = {name: i + 1 for i, name in enumerate(names)}
    src = text.strip().replace("^", "**")
    # "2x1" and "3/2 (x1 + x2)" mean an implicit product
    src = re.sub(r"(?<![A-Za-z_\d.])(\d+(?:\.\d+)?)\s*(?=[A-Za-z_(])", r"\1*", src)
    if not src:
        raise PolynomialError("empty polynomial")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise PolynomialError(f"cannot parse polynomial {text!r}") from exc

    def walk(node) -> Polynomial:
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return Polynomial.constant(nvars, Fraction(str(node.value)))
        if isinstance(node, ast.Name):
            if node.id not in lookup:
                raise PolynomialError(f"unknown variable {node.id!r} (expected one of {names})")
            return Polynomial.variable(nvars, lookup[node.id])
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            val = walk(node.operand)
            return -val if isinstance(node.op, ast.USub) else val
        if isinstance(node, ast.BinOp):
            left, right = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                if right.degree() > 0:
                    raise PolynomialError("division by a non-constant polynomial")
                if right.is_zero():
                    raise PolynomialError("division by zero")
                return left / right.constant_term()
            if isinstance(node.op, ast.Pow):
                if right.degree() > 0:
                    raise PolynomialError("non-constant exponent")
                k = right.constant_term()
                if k.denominator != 1 or k < 0:
                    raise PolynomialError("exponents must be non-negative integers")
                return left ** int(k)
        raise PolynomialError(f"unsupported syntax in polynomial {text!r}")

    return walk(tree)


class PolyVectorField:
    """Polynomial vector field ``sum_i components[i] * d/dx_i``."""

    def __init__(self, components: Iterable[Polynomial]):
        comps = tuple(components)
        if not comps:
            raise PolynomialError("vector field needs at least one component")
        n = comps[0].nvars
        if any(c.nvars != n for c in comps) or len(comps) != n:
            raise PolynomialError(
                f"vector field on R^{n} needs {n} components in {n} variables"
            )
        self.components = comps

    @property
    def n(self) -> int:
        return len(self.components)

    @classmethod
    def from_strings(cls, comps: Sequence[str], names=None) -> "PolyVectorField":
        n = len(comps)
        return cls(parse_polynomial(c, n, names) for c in comps)

    @classmethod
    def coordinate(cls, n: int, i: int) -> "PolyVectorField":
        """The constant field d/dx_i (1-based)."""
        return cls(
            Polynomial.constant(n, 1 if j == i - 1 else 0) for j in range(n)
        )

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __add__(self, other: "PolyVectorField"):
        _check_same(self, other)
        return PolyVectorField(a + b for a, b in zip(self.components, other.components))

    def __sub__(self, other: "PolyVectorField"):
        _check_same(self, other)
        return PolyVectorField(a - b for a, b in zip(self.components, other.components))

    def __neg__(self):
        return PolyVectorField(-a for a in self.components)

    def __mul__(self, c):
        return PolyVectorField(a * c for a in self.components)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, PolyVectorField) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def at(self, x: Sequence) -> list:
        """Exact (or float) value of the field at a point."""
        return [evaluate(c, x) for c in self.components]

    def evaluate_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return np.stack([c.evaluate_many(pts) for c in self.components], axis=-1)

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.components) + ")"

    __repr__ = __str__


def _check_same(X: PolyVectorField, Y: PolyVectorField):
    if X.n != Y.n:
        raise PolynomialError(f"dimension mismatch: R^{X.n} vs R^{Y.n}")


def apply_field(X: PolyVectorField, p: Polynomial) -> Polynomial:
    """Directional derivative ``X p``."""
    if X.n != p.nvars:
        raise PolynomialError("dimension mismatch")
    out = Polynomial.zero(p.nvars)
    for i, xi in enumerate(X.components, start=1):
        if not xi.is_zero():
            out = out + xi * partial_derivative(p, i)
    return out


def lie_bracket(X: PolyVectorField, Y: PolyVectorField) -> PolyVectorField:
    """``[X, Y]_j = sum_i X_i d_i Y_j - Y_i d_i X_j``."""
    _check_same(X, Y)
    return PolyVectorField(
        apply_field(X, yj) - apply_field(Y, xj) for xj, yj in zip(X.components, Y.components)
    )


class PolyMap:
    """Polynomial map R^n -> R^(n-1)."""

    def __init__(self, components: Iterable[Polynomial]):
        comps = tuple(components)
        if not comps:
            raise PolynomialError("map needs at least one component")
        n = comps[0].nvars
        if any(c.nvars != n for c in comps):
            raise PolynomialError("map components disagree on the variable count")
        if len(comps) != n - 1:
            raise PolynomialError(f"a submersion R^{n} -> R^{n - 1} needs {n - 1} components, got {len(comps)}")
        self.components = comps

    @property
    def n(self) -> int:
        return self.components[0].nvars

    @classmethod
    def from_strings(cls, comps: Sequence[str], n: int, names=None) -> "PolyMap":
        return cls(parse_polynomial(c, n, names) for c in comps)

    def jacobian(self) -> list[list[Polynomial]]:
        return [[partial_derivative(c, i) for i in range(1, self.n + 1)] for c in self.components]

    def at(self, x):
        return [evaluate(c, x) for c in self.components]

    def evaluate_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        if not self.components:
            return np.zeros((pts.shape[0], 0))
        return np.stack([c.evaluate_many(pts) for c in self.components], axis=-1)

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.components) + ")"


def poly_det(rows: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Determinant of a square polynomial matrix by Laplace expansion (memoized on column sets)."""
    m = len(rows)
    if any(len(r) != m for r in rows):
        raise PolynomialError("determinant needs a square matrix")
    if m == 0:
        raise PolynomialError("empty matrix")
    nv = rows[0][0].nvars
    memo: dict[tuple[int, ...], Polynomial] = {}

    def minor(r: int, cols: tuple[int, ...]) -> Polynomial:
        # determinant of rows r.. restricted to cols
        if r == m:
            return Polynomial.constant(nv, 1)
        if cols in memo:
            return memo[cols]
        total = Polynomial.zero(nv)
        for pos, c in enumerate(cols):
            entry = rows[r][c]
            if entry.is_zero():
                continue
            sub = minor(r + 1, cols[:pos] + cols[pos + 1 :])
            if sub.is_zero():
                continue
            term = entry * sub
            total = total - term if pos % 2 else total + term
        memo[cols] = total
        return total

    return minor(0, tuple(range(m)))


def kernel_field(pi: PolyMap) -> PolyVectorField:
    """Field spanning ker(D pi): X_i = (-1)^(i+1) * det(Jacobian with column i removed)."""
    n = pi.n
    jac = pi.jacobian()
    comps = []
    for i in range(n):
        if n == 1:
            comps.append(Polynomial.constant(1, 1))
            continue
        minor_rows = [[row[c] for c in range(n) if c != i] for row in jac]
        d = poly_det(minor_rows)
        comps.append(d if i % 2 == 0 else -d)
    return PolyVectorField(comps)


def determinant(fields: Sequence[PolyVectorField]) -> Polynomial:
    """Symbolic det of the matrix whose columns are the given fields."""
    fields = list(fields)
    if not fields:
        raise PolynomialError("no fields given")
    n = fields[0].n
    if len(fields) != n or any(f.n != n for f in fields):
        raise PolynomialError(f"determinant needs exactly {n} fields on R^{n}, got {len(fields)}")
    rows = [[f.components[i] for f in fields] for i in range(n)]
    return poly_det(rows)


def rational_rank(rows: Sequence[Sequence[Fraction]]) -> tuple[int, list[int]]:
    """Exact rank of a rational matrix and the indices of a maximal independent row set.

    Rows are processed in order, so the returned indices are the greedy
    (lexicographically first) independent subset.
    """
    basis: list[tuple[int, list[Fraction]]] = []  # (pivot column, reduced row)
    chosen = []
    for idx, row in enumerate(rows):
        v = [Fraction(x) for x in row]
        for piv, b in basis:
            if v[piv]:
                f = v[piv] / b[piv]
                v = [a - f * c for a, c in zip(v, b)]
        piv = next((j for j, a in enumerate(v) if a), None)
        if piv is not None:
            basis.append((piv, v))
            chosen.append(idx)
    return len(basis), chosen


def rational_det(matrix: Sequence[Sequence[Fraction]]) -> Fraction:
    m = [[Fraction(x) for x in row] for row in matrix]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            if m[r][c]:
                f = m[r][c] / m[c][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return det


def random_polynomial(rng, nvars: int, max_degree: int, n_terms: int = 4, coef_range: int = 5) -> Polynomial:
    """Random sparse polynomial with small integer/half-integer coefficients (for tests)."""
    all_exps = [
        e for e in itertools.product(range(max_degree + 1), repeat=nvars) if sum(e) <= max_degree
    ]
    terms = {}
    for _ in range(n_terms):
        e = all_exps[rng.integers(len(all_exps))]
        terms[e] = Fraction(int(rng.integers(-coef_range, coef_range + 1)), int(rng.integers(1, 3)))
    return Polynomial(nvars, terms)


def random_field(rng, n: int, max_degree: int, n_terms: int = 3) -> PolyVectorField:
    return PolyVectorField(random_polynomial(rng, n, max_degree, n_terms) for _ in range(n))

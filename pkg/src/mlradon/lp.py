"""Small exact linear programs over the rationals.

Two-phase tableau simplex with Bland's rule, so it terminates on degenerate
problems.  Intended for the tiny instances the polytope code produces (a few
hundred columns at most).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPResult:
    status: str
    x: list[Fraction] | None = None
    value: Fraction | None = None

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    def __init__(self, rows, rhs, basis):
        self.rows = rows  # list of lists of Fraction
        self.rhs = rhs
        self.basis = basis

    def pivot(self, i: int, j: int, cost: list[Fraction], value: list[Fraction]):
        row = self.rows[i]
        p = row[j]
        if p != 1:
            self.rows[i] = row = [v / p for v in row]
            self.rhs[i] = self.rhs[i] / p
        for r, other in enumerate(self.rows):
            if r != i and other[j]:
                f = other[j]
                self.rows[r] = [a - f * b for a, b in zip(other, row)]
                self.rhs[r] -= f * self.rhs[i]
        if cost[j]:
            f = cost[j]
            cost[:] = [a - f * b for a, b in zip(cost, row)]
            value[0] += f * self.rhs[i]
        self.basis[i] = j

    def optimize(self, cost: list[Fraction], value: list[Fraction], allowed: int) -> str:
        """Maximize with reduced costs ``cost``; only columns < ``allowed`` may enter."""
        while True:
            j = next((c for c in range(allowed) if cost[c] > 0), None)
            if j is None:
                return OPTIMAL
            best = None
            for i, row in enumerate(self.rows):
                if row[j] > 0:
                    ratio = self.rhs[i] / row[j]
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], j, cost, value)


def linprog_max(
    c: Sequence,
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    free: Sequence[int] = (),
) -> LPResult:
    """Maximize ``c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``.

    Variables are non-negative except those listed in ``free``, which are split
    into positive and negative parts internally.
    """
    nv = len(c)
    free = sorted(set(free))
    # column layout: original vars, negative parts of free vars, slacks, artificials
    cols = list(range(nv)) + free

    def expand(row):
        row = [Fraction(v) for v in row]
        if len(row) != nv:
            raise ValueError(f"constraint row has {len(row)} entries, expected {nv}")
        return row + [-row[f] for f in free]

    ub = [expand(r) for r in A_ub]
    eq = [expand(r) for r in A_eq]
    b_ub = [Fraction(v) for v in b_ub]
    b_eq = [Fraction(v) for v in b_eq]
    if len(ub) != len(b_ub) or len(eq) != len(b_eq):
        raise ValueError("constraint matrix and right-hand side lengths differ")
    m_ub, m = len(ub), len(ub) + len(eq)
    nx = len(cols)
    nslack = m_ub
    ncol = nx + nslack + m
    rows, rhs = [], []
    for i, (r, b) in enumerate(zip(ub + eq, b_ub + b_eq)):
        full = r + [Fraction(0)] * (nslack + m)
        if i < m_ub:
            full[nx + i] = Fraction(1)
        if b < 0:
            full = [-v for v in full]
            b = -b
        full[nx + nslack + i] = Fraction(1)
        rows.append(full)
        rhs.append(b)
    tab = _Tableau(rows, rhs, [nx + nslack + i for i in range(m)])

    # phase 1: maximize -sum(artificials)
    cost = [Fraction(0)] * ncol
    value = [Fraction(0)]
    for i in range(m):
        for j in range(nx + nslack):
            cost[j] += rows[i][j]
        value[0] -= rhs[i]
    status = tab.optimize(cost, value, nx + nslack)
    if status != OPTIMAL or value[0] < 0:
        return LPResult(INFEASIBLE)

    # drive remaining artificials out of the basis, dropping redundant rows
    art0 = nx + nslack
    i = 0
    while i < len(tab.rows):
        if tab.basis[i] >= art0:
            j = next((c for c in range(art0) if tab.rows[i][c] != 0), None)
            if j is None:
                del tab.rows[i], tab.rhs[i], tab.basis[i]
                continue
            tab.pivot(i, j, [Fraction(0)] * ncol, [Fraction(0)])
        i += 1

    # phase 2
    obj = [Fraction(v) for v in c] + [-Fraction(c[f]) for f in free]
    obj += [Fraction(0)] * (ncol - nx)
    cost = list(obj)
    value = [Fraction(0)]
    for i, bcol in enumerate(tab.basis):
        if cost[bcol]:
            f = cost[bcol]
            cost = [a - f * b for a, b in zip(cost, tab.rows[i])]
            value[0] += f * tab.rhs[i]
    status = tab.optimize(cost, value, art0)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    sol = [Fraction(0)] * ncol
    for i, bcol in enumerate(tab.basis):
        sol[bcol] = tab.rhs[i]
    x = sol[:nv]
    for pos, f in enumerate(free):
        x[f] -= sol[nv + pos]
    return LPResult(OPTIMAL, x, value[0])


def feasible(A_ub=(), b_ub=(), A_eq=(), b_eq=(), nvars: int | None = None) -> LPResult:
    if nvars is None:
        nvars = len((list(A_ub) or list(A_eq))[0])
    return linprog_max([0] * nvars, A_ub, b_ub, A_eq, b_eq)

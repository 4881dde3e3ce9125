"""Exact rational linear programming (two-phase simplex, Bland's rule)."""
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
    x: list | None = None
    value: Fraction | None = None


def _F(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def solve_standard(M: Sequence[Sequence], r: Sequence, c: Sequence | None = None) -> LPResult:
    """min c.y subject to M y = r, y >= 0.  With c None only feasibility is decided."""
    m = len(M)
    n = len(M[0]) if m else (len(c) if c is not None else 0)
    rows = []
    rhs = []
    for row, b in zip(M, r):
        row = [_F(v) for v in row]
        b = _F(b)
        if b < 0:
            row = [-v for v in row]
            b = -b
        rows.append(row)
        rhs.append(b)
    # tableau columns: n originals, m artificials
    T = [rows[i] + [Fraction(int(i == j)) for j in range(m)] + [rhs[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    width = n + m

    def pivot(pr, pc):
        piv = T[pr][pc]
        T[pr] = [v / piv for v in T[pr]]
        for i in range(len(T)):
            if i != pr and T[i][pc] != 0:
                f = T[i][pc]
                Ti, Tp = T[i], T[pr]
                T[i] = [a - f * b for a, b in zip(Ti, Tp)]
        basis[pr] = pc

    def run(cost, allowed):
        # cost: list over all columns; minimise
        while True:
            red = []
            for j in allowed:
                if j in basis:
                    continue
                d = cost[j] - sum(cost[basis[i]] * T[i][j] for i in range(len(T)))
                if d < 0:
                    red.append(j)
                    break  # Bland: smallest improving index
            if not red:
                return OPTIMAL
            j = red[0]
            best = None
            for i in range(len(T)):
                if T[i][j] > 0:
                    ratio = T[i][-1] / T[i][j]
                    if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                return UNBOUNDED
            pivot(best[1], j)

    cost1 = [Fraction(0)] * n + [Fraction(1)] * m
    run(cost1, range(width))
    if sum(T[i][-1] for i in range(len(T)) if basis[i] >= n) > 0:
        return LPResult(INFEASIBLE)
    # drive artificials out of the basis, drop redundant rows
    i = 0
    while i < len(T):
        if basis[i] >= n:
            col = next((j for j in range(n) if T[i][j] != 0), None)
            if col is None:
                del T[i]
                del basis[i]
                continue
            pivot(i, col)
        i += 1
    if c is None:
        x = [Fraction(0)] * n
        for i, b in enumerate(basis):
            x[b] = T[i][-1]
        return LPResult(OPTIMAL, x, Fraction(0))
    cost2 = [_F(v) for v in c] + [Fraction(0)] * m
    status = run(cost2, range(n))
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    x = [Fraction(0)] * n
    for i, b in enumerate(basis):
        x[b] = T[i][-1]
    return LPResult(OPTIMAL, x, sum(ci * xi for ci, xi in zip(cost2, x)))


def linprog(c: Sequence, A_ub: Sequence = (), b_ub: Sequence = (),
            A_eq: Sequence = (), b_eq: Sequence = ()) -> LPResult:
    """max c.x over free x with A_ub x <= b_ub and A_eq x = b_eq, exactly."""
    n = len(c)
    k = len(A_ub)
    M, r = [], []
    for i, (row, b) in enumerate(zip(A_ub, b_ub)):
        row = [_F(v) for v in row]
        M.append(row + [-v for v in row] + [Fraction(int(i == j)) for j in range(k)])
        r.append(b)
    for row, b in zip(A_eq, b_eq):
        row = [_F(v) for v in row]
        M.append(row + [-v for v in row] + [Fraction(0)] * k)
        r.append(b)
    cost = [-_F(v) for v in c] + [_F(v) for v in c] + [Fraction(0)] * k
    if not M:
        if any(v != 0 for v in c):
            return LPResult(UNBOUNDED)
        return LPResult(OPTIMAL, [Fraction(0)] * n, Fraction(0))
    res = solve_standard(M, r, cost)
    if res.status != OPTIMAL:
        return res
    x = [res.x[i] - res.x[n + i] for i in range(n)]
    return LPResult(OPTIMAL, x, sum(_F(ci) * xi for ci, xi in zip(c, x)))


def farkas_nonneg(A: Sequence[Sequence], b: Sequence) -> list | None:
    """y >= 0 with y A = 0 and y.b = -1, or None if A x <= b is feasible."""
    m = len(A)
    n = len(A[0]) if m else 0
    M = [[_F(A[i][j]) for i in range(m)] for j in range(n)]
    M.append([_F(v) for v in b])
    r = [Fraction(0)] * n + [Fraction(-1)]
    res = solve_standard(M, r)
    return res.x if res.status == OPTIMAL else None


def interior_point(strict: Sequence[Sequence], eq: Sequence[Sequence] = ()) -> list | None:
    """A point x with f.x < 0 for every f in ``strict`` and g.x = 0 for g in ``eq``.

    Maximises the smallest slack over the box |x_i| <= 1; returns None when the
    open set is empty.
    """
    if not strict:
        n = len(eq[0]) if eq else 0
        return [Fraction(0)] * n
    n = len(strict[0])
    A, b = [], []
    for f in strict:
        A.append([_F(v) for v in f] + [Fraction(1)])
        b.append(Fraction(0))
    for i in range(n):
        e = [Fraction(int(i == j)) for j in range(n)]
        A.append(e + [Fraction(0)])
        b.append(Fraction(1))
        A.append([-v for v in e] + [Fraction(0)])
        b.append(Fraction(1))
    A.append([Fraction(0)] * n + [Fraction(1)])
    b.append(Fraction(1))
    Aeq = [[_F(v) for v in g] + [Fraction(0)] for g in eq]
    res = linprog([0] * n + [1], A, b, Aeq, [0] * len(Aeq))
    if res.status != OPTIMAL or res.value <= 0:
        return None
    return res.x[:n]

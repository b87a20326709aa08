"""Exact rational simplex (two phases, Bland's rule) for

    maximise c.x  subject to  A x = b,  x >= 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class LpResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None
    x: tuple[Fraction, ...] | None


def _pivot(T, basis, row, col):
    pr = T[row]
    p = pr[col]
    T[row] = pr = [v / p for v in pr]
    for i, r in enumerate(T):
        if i != row and r[col] != 0:
            f = r[col]
            T[i] = [a - f * b for a, b in zip(r, pr)]
    basis[row] = col


def _run(T, basis, ncols):
    """Optimise the objective stored in the last row (reduced costs, minimisation form)."""
    m = len(T) - 1
    while True:
        obj = T[-1]
        col = next((j for j in range(ncols) if obj[j] < 0), None)
        if col is None:
            return "optimal"
        best = None
        for i in range(m):
            a = T[i][col]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return "unbounded"
        _pivot(T, basis, best[1], col)


def maximise(c, A, b) -> LpResult:
    c = [Fraction(v) for v in c]
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    m, n = len(A), len(c)
    for i in range(m):
        if b[i] < 0:
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]
    # phase one: artificials n..n+m-1, minimise their sum
    T = [A[i] + [Fraction(int(i == k)) for k in range(m)] + [b[i]] for i in range(m)]
    obj = [Fraction(0)] * (n + m + 1)
    for i in range(m):
        obj = [o - v for o, v in zip(obj, T[i])]
    for k in range(m):
        obj[n + k] = Fraction(0)
    T.append(obj)
    basis = [n + i for i in range(m)]
    _run(T, basis, n + m)
    if T[-1][-1] != 0:
        return LpResult("infeasible", None, None)
    # drive remaining artificials out of the basis
    for i in range(m):
        if basis[i] >= n:
            col = next((j for j in range(n) if T[i][j] != 0), None)
            if col is not None:
                _pivot(T, basis, i, col)
    keep = [i for i in range(m) if basis[i] < n]
    T2 = [T[i][:n] + [T[i][-1]] for i in keep]
    basis2 = [basis[i] for i in keep]
    obj = [-v for v in c] + [Fraction(0)]
    for i, bcol in enumerate(basis2):
        f = obj[bcol]
        if f != 0:
            obj = [o - f * v for o, v in zip(obj, T2[i])]
    T2.append(obj)
    status = _run(T2, basis2, n)
    if status == "unbounded":
        return LpResult("unbounded", None, None)
    x = [Fraction(0)] * n
    for i, bcol in enumerate(basis2):
        x[bcol] = T2[i][-1]
    value = sum(ci * xi for ci, xi in zip(c, x))
    return LpResult("optimal", value, tuple(x))

"""Independent exact oracles used only by the tests."""
import itertools
from fractions import Fraction


def solve_square(M, rhs):
    """Gauss-Jordan over Fractions; None when singular."""
    n = len(M)
    A = [list(map(Fraction, row)) + [Fraction(v)] for row, v in zip(M, rhs)]
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            return None
        A[c], A[p] = A[p], A[c]
        piv = A[c][c]
        A[c] = [v / piv for v in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return [A[r][n] for r in range(n)]


def lp_by_vertices(c, A, b):
    """max c.x s.t. Ax = b, x >= 0 by enumerating basic feasible solutions
    (assumes A has full row rank and the feasible set is bounded)."""
    m, n = len(A), len(c)
    best = None
    for cols in itertools.combinations(range(n), m):
        sub = [[A[i][j] for j in cols] for i in range(m)]
        sol = solve_square(sub, b)
        if sol is None or any(v < 0 for v in sol):
            continue
        val = sum(Fraction(c[j]) * v for j, v in zip(cols, sol))
        best = val if best is None else max(best, val)
    return best


def simple_cycles(succ):
    """All simple cycles of a small directed graph, each as a node list."""
    nodes = sorted(succ)
    out = []
    for start in nodes:
        stack = [(start, [start])]
        while stack:
            v, path = stack.pop()
            for w in succ[v]:
                if w == start:
                    out.append(path)
                elif w > start and w not in path:
                    stack.append((w, path + [w]))
    return out


def sft_max_by_cycles(sft, objective):
    """Extreme points of the window-k block polytope are uniform measures on
    simple cycles of the block graph; maximise the objective over them."""
    blocks = sft.blocks()
    succ = {w: [v for v in blocks if v[:-1] == w[1:]] for w in blocks}
    best = None
    for cyc in simple_cycles(succ):
        val = Fraction(sum(Fraction(objective.get(w, 0)) for w in cyc), len(cyc))
        best = val if best is None else max(best, val)
    return best

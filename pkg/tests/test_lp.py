import random
from fractions import Fraction as F

from hypothesis import given
from hypothesis import strategies as st

from dyndim.lp import maximise
from oracles import lp_by_vertices


def test_simple_lp():
    # max x + 2y, x + y + s = 4, x + 3y + t = 6
    res = maximise([1, 2, 0, 0], [[1, 1, 1, 0], [1, 3, 0, 1]], [4, 6])
    assert res.status == "optimal" and res.value == 5
    assert res.x[:2] == (F(3), F(1))


def test_infeasible_and_unbounded():
    assert maximise([1, 0], [[1, 1], [1, 1]], [1, 2]).status == "infeasible"
    assert maximise([1, 0], [[1, -1]], [0]).status == "unbounded"


def test_negative_rhs_is_normalised():
    res = maximise([1, 1], [[-1, -1]], [-3])
    assert res.value == 3


def test_degenerate_cycling_example_terminates():
    # a classic cycling instance for the largest-coefficient rule
    A = [[F(1, 2), F(-11, 2), F(-5, 2), 9, 1, 0, 0],
         [F(1, 2), F(-3, 2), F(-1, 2), 1, 0, 1, 0],
         [1, 0, 0, 0, 0, 0, 1]]
    res = maximise([10, -57, -9, -24, 0, 0, 0], A, [0, 0, 1])
    assert res.status == "optimal" and res.value == 1


@given(st.integers(0, 10_000))
def test_random_bounded_lps_match_vertex_enumeration(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 6)
    m = rng.randint(1, min(3, n - 1))
    x0 = [F(rng.randint(0, 5)) for _ in range(n)]
    if not any(x0):
        x0[0] = F(1)
    rows = [[F(1)] * n] + [[F(rng.randint(-3, 3)) for _ in range(n)] for _ in range(m)]
    b = [sum(r[j] * x0[j] for j in range(n)) for r in rows]
    c = [F(rng.randint(-5, 5)) for _ in range(n)]
    res = maximise(c, rows, b)
    assert res.status == "optimal"
    assert all(sum(r[j] * res.x[j] for j in range(n)) == v for r, v in zip(rows, b))
    # drop dependent rows for the oracle
    indep = []
    for r, v in zip(rows, b):
        trial = indep + [(r, v)]
        if _rank([t[0] for t in trial]) == len(trial):
            indep = trial
    assert res.value == lp_by_vertices(c, [t[0] for t in indep], [t[1] for t in indep])


def _rank(rows):
    M = [list(r) for r in rows]
    rank, col, ncol = 0, 0, len(M[0])
    while rank < len(M) and col < ncol:
        p = next((i for i in range(rank, len(M)) if M[i][col] != 0), None)
        if p is None:
            col += 1
            continue
        M[rank], M[p] = M[p], M[rank]
        for i in range(len(M)):
            if i != rank and M[i][col] != 0:
                f = M[i][col] / M[rank][col]
                M[i] = [a - f * bb for a, bb in zip(M[i], M[rank])]
        rank += 1
        col += 1
    return rank

"""Partitions of unity, nerves, and pointwise subadditivity of order."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .certificate import Certificate
from .errors import BudgetError, CoverError, UnsupportedError
from .ground import (BitSet, BoxUnion, Cover, Interval, joint_refinement, ord_at, refinement_failure,
                     sample_points, subset)


@dataclass(frozen=True)
class PartitionOfUnity:
    cover: Cover
    values: tuple[tuple[Fraction, ...], ...]  # values[x][i] = f_i(x)

    def __call__(self, x: int) -> tuple[Fraction, ...]:
        return self.values[x]


def partition_of_unity(cover: Cover) -> PartitionOfUnity:
    """f_i(x) = dist(x, X minus U_i), normalised to sum 1 at every point.

    When U_i is the whole space its complement is empty; the distance is then
    taken as 1 + diam(X), which keeps f_i positive everywhere.
    """
    space = cover.space
    if space is None or cover.symbolic:
        raise UnsupportedError("partitions of unity are built on finite metric spaces")
    pts = list(space.points)
    far = 1 + max((space.dist(i, j) for i in pts for j in pts), default=Fraction(0))
    raw = []
    for x in pts:
        row = []
        for s in cover.sets:
            outside = [y for y in pts if y not in s.members]
            row.append(min((space.dist(x, y) for y in outside), default=far) if x in s.members else Fraction(0))
        total = sum(row)
        if total == 0:
            raise CoverError(f"point {x} lies in no cover set")
        raw.append(tuple(v / total for v in row))
    return PartitionOfUnity(cover, tuple(raw))


def nerve_map(pou: PartitionOfUnity, x: int) -> tuple[Fraction, ...]:
    return pou(x)


def support(vec) -> frozenset[int]:
    return frozenset(i for i, v in enumerate(vec) if v > 0)


def nerve(cover: Cover, max_size: int | None = None) -> list[tuple[int, ...]]:
    """All index sets J with a nonempty common intersection, sorted."""
    pts = sample_points(cover)
    found: set[tuple[int, ...]] = set()
    for x in pts:
        J = tuple(i for i, s in enumerate(cover.sets) if s.contains(x))
        top = len(J) if max_size is None else min(len(J), max_size)
        for k in range(1, top + 1):
            found.update(itertools.combinations(J, k))
    return sorted(found, key=lambda J: (len(J), J))


def verify_subadditive(v: Cover, u1: Cover, u2: Cover) -> Certificate:
    joint = joint_refinement(u1, u2)
    bad = refinement_failure(v, joint)
    witness: dict = {"sets": len(v)}
    if bad is not None:
        witness["not_refining"] = bad
        return Certificate("fail", "ord_subadditive", None, witness, False, stage="refinement")
    worst_slack = None
    for x in sample_points(v, (u1, u2)):
        lhs = ord_at(v, x)
        rhs = ord_at(u1, x) + ord_at(u2, x)
        if lhs > rhs:
            witness["point"] = list(x) if isinstance(x, tuple) else x
            witness["ord_v"], witness["ord_sum"] = lhs, rhs
            return Certificate("fail", "ord_subadditive", None, witness, False, stage="pointwise")
        slack = rhs - lhs
        worst_slack = slack if worst_slack is None else min(worst_slack, slack)
    witness["min_slack"] = worst_slack
    return Certificate("pass", "ord_subadditive", None, witness, True)


def _chain_cells(u1: Cover, u2: Cover, granularity):
    """Cells, vertex incidences and per-vertex bounds for a 1-dimensional grid."""
    pairs = [(i, j) for i in range(len(u1)) for j in range(len(u2))]
    if u1.symbolic:
        if len(u1.box) != 1:
            raise UnsupportedError("box search is implemented on intervals only")
        lo, hi = u1.box[0].lo, u1.box[0].hi
        g = granularity
        step = (hi - lo) / g
        cells = [BoxUnion(((Interval(lo + k * step, lo + (k + 1) * step),),)) for k in range(g)]
        inside = [[p for p in pairs if subset(c, u1.sets[p[0]]) and subset(c, u2.sets[p[1]])] for c in cells]
        verts = []
        for k in range(g + 1):
            x = (lo + k * step,)
            inc = [c for c in (k - 1, k) if 0 <= c < g]
            verts.append((inc, ord_at(u1, x) + ord_at(u2, x)))

        def build(lab):
            groups: dict = {}
            for c, p in zip(cells, lab):
                groups.setdefault(p, []).extend(c.boxes)
            return Cover(tuple(BoxUnion(tuple(groups[p])) for p in sorted(groups)), "search", None, u1.box)

        return inside, verts, build
    space = u1.space
    cx = space.complex
    if cx is None:
        raise UnsupportedError("discrete spaces need no search")
    cells = list(range(cx.cells))
    inside = [[p for p in pairs if cx.closed_arc(e, 1) <= (u1.sets[p[0]].members & u2.sets[p[1]].members)]
              for e in cells]
    verts = [(cx.incident_edges(v), ord_at(u1, v) + ord_at(u2, v)) for v in range(cx.nv)]

    def build(lab):
        groups: dict = {}
        for e, p in zip(cells, lab):
            groups.setdefault(p, []).append(cx.edge_atom(e))
        return Cover(tuple(BitSet(cx.closure(groups[p])) for p in sorted(groups)), "search", space)

    return inside, verts, build


def subadditive_search(u1: Cover, u2: Cover, granularity: int | None = None, budget: int = 1_000_000):
    """Find a cell-built refinement of u1 v u2 whose order is pointwise at most
    ord(u1, x) + ord(u2, x). Returns (found, cover or None).

    Cells get labels (i, j) with the closed cell inside U1_i ∩ U2_j; only
    vertices can carry order, so constraints are checked at vertices during a
    depth-first search in cell order.
    """
    if not u1.symbolic and u1.space.complex is None:
        space = u1.space
        classes: dict = {}
        for x in space.points:
            i = next((i for i, s in enumerate(u1.sets) if x in s.members), None)
            j = next((j for j, s in enumerate(u2.sets) if x in s.members), None)
            if i is None or j is None:
                raise CoverError(f"point {x} uncovered")
            classes.setdefault((i, j), set()).add(x)
        return True, Cover(tuple(BitSet(frozenset(classes[k])) for k in sorted(classes)), "partition", space)
    inside, verts, build = _chain_cells(u1, u2, granularity)
    if any(not opts for opts in inside):
        return False, None
    ncell = len(inside)
    by_last: dict[int, list] = {}
    for inc, bound in verts:
        by_last.setdefault(max(inc), []).append((inc, bound))
    lab: list = [None] * ncell
    steps = 0

    def ok_at(c):
        for inc, bound in by_last.get(c, []):
            if len({lab[e] for e in inc}) - 1 > bound:
                return False
        return True

    def dfs(c):
        nonlocal steps
        if c == ncell:
            return True
        for p in inside[c]:
            steps += 1
            if steps > budget:
                raise BudgetError("subadditive search budget exhausted", partial=None)
            lab[c] = p
            if ok_at(c) and dfs(c + 1):
                return True
        lab[c] = None
        return False

    if not dfs(0):
        return False, None
    v = build(lab)
    return verify_subadditive(v, u1, u2).passed, v

"""Ostrand-Kolmogorov families: k families of pairwise disjoint closed sets
refining a finite open cover, with sum_j ord(C_j, x) >= -ord(U, x).

The map f: X -> [0,1]^r is the distance partition of unity rescaled so its
largest coordinate is exactly 1. The families come from pulling back
products of the intervals

    I_j = { [((k+1)n - j) / 2kr, ((k+1)n - j + k) / 2kr] : n in Z },

closed intervals of length 1/2r whose open gaps of length 1/2kr are disjoint
across j. Grid points of (1/2kr)Z, in particular 0 and 1, lie in every I_j.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .certificate import Certificate
from .errors import UnsupportedError
from .ground import BitSet, Cover, Interval, ord_at, refinement_failure
from .nerve import partition_of_unity


def interval_family(j: int, k: int, r: int, lo=0, hi=1) -> list[Interval]:
    """The intervals of I_j meeting [lo, hi] (unclipped)."""
    den = 2 * k * r
    out = []
    n = math.floor((Fraction(lo) * den + j - k) / (k + 1)) - 1
    while Fraction((k + 1) * n - j, den) <= hi:
        a, b = Fraction((k + 1) * n - j, den), Fraction((k + 1) * n - j + k, den)
        if b >= lo:
            out.append(Interval(a, b))
        n += 1
    return out


def interval_index(j: int, k: int, r: int, t: Fraction) -> int | None:
    """n with t in the n-th interval of I_j, or None when t sits in a gap."""
    den = 2 * k * r
    n = math.floor((t * den + j) / (k + 1))
    a = Fraction((k + 1) * n - j, den)
    return n if a <= t <= a + Fraction(k, den) else None


def interval_ord(j: int, k: int, r: int, t: Fraction) -> int:
    return -1 + sum(1 for iv in interval_family(j, k, r, t, t) if iv.contains(t))


def max_normalised(pou_row):
    top = max(pou_row)
    return tuple(v / top for v in pou_row)


@dataclass(frozen=True)
class OkFamilies:
    k: int
    source: Cover
    families: tuple[tuple[BitSet, ...], ...]
    cubes: tuple[tuple[tuple[int, ...], ...], ...]  # interval indices n_1..n_r per set
    fmap: tuple[tuple[Fraction, ...], ...]


def build_ok(u: Cover, k: int) -> OkFamilies:
    if u.symbolic or u.space is None:
        raise UnsupportedError("families are built on finite metric spaces")
    if k < 1:
        raise UnsupportedError("k must be positive")
    pou = partition_of_unity(u)
    fmap = tuple(max_normalised(row) for row in pou.values)
    r = len(u)
    fams, cubes = [], []
    for j in range(k):
        groups: dict[tuple[int, ...], set[int]] = {}
        for x, fx in enumerate(fmap):
            idx = tuple(interval_index(j, k, r, v) for v in fx)
            if None in idx:
                continue
            groups.setdefault(idx, set()).add(x)
        keys = sorted(groups)
        fams.append(tuple(BitSet(frozenset(groups[c])) for c in keys))
        cubes.append(tuple(keys))
    return OkFamilies(k, u, tuple(fams), tuple(cubes), fmap)


def family_ord(family, x: int) -> int:
    return -1 + sum(1 for s in family if x in s.members)


def verify_ok(ok: OkFamilies) -> Certificate:
    u = ok.source
    witness: dict = {"k": ok.k, "sets": [len(f) for f in ok.families]}
    for j, fam in enumerate(ok.families):
        for a in range(len(fam)):
            for b in range(a + 1, len(fam)):
                common = fam[a].members & fam[b].members
                if common:
                    witness["overlap"] = {"family": j, "sets": [a, b], "point": min(common)}
                    return Certificate("fail", "ok_families", None, witness, False, stage="disjointness")
        bad = refinement_failure(Cover(fam, space=u.space), u)
        if bad is not None:
            witness["not_refining"] = {"family": j, "set": bad}
            return Certificate("fail", "ok_families", None, witness, False, stage="refinement")
    min_slack = None
    for x in u.space.points:
        lhs = sum(family_ord(f, x) for f in ok.families)
        rhs = -ord_at(u, x)
        if lhs < rhs:
            witness["point"] = x
            witness["sum_ord"], witness["neg_ord"] = lhs, rhs
            return Certificate("fail", "ok_families", None, witness, False, stage="order_inequality")
        min_slack = lhs - rhs if min_slack is None else min(min_slack, lhs - rhs)
    witness["min_slack"] = min_slack
    return Certificate("pass", "ok_families", None, witness, True)

"""Brickwall covers of R^d and their exact verification on a bounded box.

The cover is built by induction on the dimension. Going from dimension m to
m+1 picks a shift t (so that the lattice sets and their t-translates are
disjoint) and a layer offset s (avoiding every lattice point), then stacks
layers of height eps/2, alternating plain and t-shifted copies of the
m-dimensional cover. Along the way each coordinate keeps a locally finite
lattice set A_l that controls how many cells can meet at a point.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .certificate import Certificate
from .errors import BudgetError, ValidationError
from .ground import Box, BoxUnion, Cover, Interval, axis_atoms, closed, unit_box
from .parallel import pmap
from .rational import q

MAX_DIM = 4
DEFAULT_ATOM_BUDGET = 3_000_000


def frac_mod(x: Fraction, m: Fraction) -> Fraction:
    return x - m * math.floor(x / m)


def frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    den = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
    return Fraction(math.gcd(int(a * den), int(b * den)), den)


@dataclass(frozen=True)
class LatticeSet:
    """A finite union of progressions offset + step*Z, offsets reduced mod step."""

    offsets: tuple[Fraction, ...]
    step: Fraction

    @classmethod
    def of(cls, offsets, step) -> "LatticeSet":
        step = q(step)
        return cls(tuple(sorted({frac_mod(q(o), step) for o in offsets})), step)

    def contains(self, t: Fraction) -> bool:
        r = frac_mod(t, self.step)
        return r in self.offsets

    def shifted(self, t: Fraction) -> "LatticeSet":
        return LatticeSet.of([o + t for o in self.offsets], self.step)

    def union(self, other: "LatticeSet") -> "LatticeSet":
        if other.step != self.step:
            raise ValidationError("union of lattice sets with different steps")
        return LatticeSet.of(self.offsets + other.offsets, self.step)

    def points_in(self, lo: Fraction, hi: Fraction) -> list[Fraction]:
        out = []
        for o in self.offsets:
            n = math.ceil((lo - o) / self.step)
            while o + n * self.step <= hi:
                out.append(o + n * self.step)
                n += 1
        return sorted(out)


def lattice_meet(a: LatticeSet, b: LatticeSet) -> Fraction | None:
    """A common point of two lattice sets, or None when they are disjoint.

    o1 + s1*Z meets o2 + s2*Z exactly when o1 - o2 lies in gcd(s1, s2)*Z.
    """
    g = frac_gcd(a.step, b.step)
    for o1 in a.offsets:
        for o2 in b.offsets:
            if frac_mod(o1 - o2, g) == 0:
                # solve o1 + s1*x = o2 + s2*y for a concrete witness
                for x in range(int(b.step / g) + 1):
                    p = o1 + a.step * x
                    if b.contains(p):
                        return p
    return None


@dataclass(frozen=True)
class BrickwallCover:
    d: int
    eps: Fraction
    shifts: tuple[tuple[Fraction, Fraction], ...]  # (t, s) for each step m -> m+1
    lattice: tuple[LatticeSet, ...]
    box: Box

    @property
    def half(self) -> Fraction:
        return self.eps / 2


def _pick(h: Fraction, forbidden: set[Fraction]) -> Fraction:
    k = 1
    while True:
        c = h / 3**k
        if c not in forbidden:
            return c
        k += 1


def build_brickwall(d: int, eps, box: Box | None = None, shifts=None, max_dim: int = MAX_DIM) -> BrickwallCover:
    """Build the brickwall cover; `shifts` overrides the (t, s) choices (for tampering tests)."""
    eps = q(eps)
    if d < 1 or d > max_dim:
        raise ValidationError(f"dimension {d} outside 1..{max_dim}")
    if eps <= 0:
        raise ValidationError("eps must be positive")
    box = tuple(box) if box is not None else unit_box(d)
    if len(box) != d:
        raise ValidationError("box dimension differs from d")
    h = eps / 2
    lattice = [LatticeSet.of([0], h)]
    chosen = []
    for m in range(1, d):
        if shifts is not None:
            t, s = q(shifts[m - 1][0]), q(shifts[m - 1][1])
        else:
            diffs = {frac_mod(a - b, h) for A in lattice for B in lattice for a in A.offsets for b in B.offsets}
            t = _pick(h, diffs)
        lattice = [A.union(A.shifted(t)) for A in lattice]
        if shifts is None:
            s = _pick(h, {o for A in lattice for o in A.offsets})
        lattice.append(LatticeSet.of([s], h))
        chosen.append((t, s))
    return BrickwallCover(d, eps, tuple(chosen), tuple(lattice), box)


def _layer_intervals(lo: Fraction, hi: Fraction, eps: Fraction, s: Fraction):
    """Layer intervals meeting [lo, hi]: (kind, lo, hi) with kind 0 plain, 1 shifted."""
    h = eps / 2
    out = []
    n = math.floor((lo - s) / eps) - 1
    while s + eps * n <= hi:
        a = s + eps * n
        for kind, (x, y) in enumerate(((a, a + h), (a + h, a + eps))):
            if y >= lo and x <= hi:
                out.append((kind, x, y))
        n += 1
    return out


def cells(bw: BrickwallCover, box: Box | None = None) -> list[tuple[tuple[Fraction, Fraction], ...]]:
    """All cells (as tuples of closed (lo, hi) pairs) meeting the box."""
    box = box or bw.box
    h = bw.half

    @lru_cache(maxsize=None)
    def rec(m: int, lows: tuple, highs: tuple):
        if m == 1:
            lo, hi = lows[0], highs[0]
            n0 = math.ceil(lo / h) - 1
            n1 = math.floor(hi / h)
            return tuple(((h * n, h * (n + 1)),) for n in range(n0, n1 + 1) if h * (n + 1) >= lo)
        t, s = bw.shifts[m - 2]
        out = []
        for kind, a, b in _layer_intervals(lows[m - 1], highs[m - 1], bw.eps, s):
            if kind == 0:
                for c in rec(m - 1, lows[: m - 1], highs[: m - 1]):
                    out.append(c + ((a, b),))
            else:
                sub = rec(m - 1, tuple(x - t for x in lows[: m - 1]), tuple(x - t for x in highs[: m - 1]))
                for c in sub:
                    out.append(tuple((x + t, y + t) for x, y in c) + ((a, b),))
        return tuple(out)

    return list(rec(bw.d, tuple(iv.lo for iv in box), tuple(iv.hi for iv in box)))


def brickwall_cover(bw: BrickwallCover) -> Cover:
    """The materialised cells as a generic box cover (for cross-checks)."""
    sets = tuple(BoxUnion((tuple(Interval(a, b) for a, b in c),)) for c in cells(bw))
    return Cover(sets, f"brickwall d={bw.d} eps={bw.eps}", None, bw.box)


def brickwall_count(bw: BrickwallCover, v: Sequence[Fraction]) -> int:
    """Number of cells containing v, by walking the induction (no materialisation)."""
    h = bw.half

    def count(m: int, x: tuple) -> int:
        if m == 1:
            return 2 if frac_mod(x[0], h) == 0 else 1
        t, s = bw.shifts[m - 2]
        r = frac_mod(x[m - 1] - s, bw.eps)
        plain = r <= h or r == 0
        shifted = r >= h or r == 0
        total = 0
        if plain:
            total += count(m - 1, x[: m - 1])
        if shifted:
            total += count(m - 1, tuple(y - t for y in x[: m - 1]))
        return total

    return count(bw.d, tuple(q(c) for c in v))


def brickwall_ord(bw: BrickwallCover, v) -> int:
    return brickwall_count(bw, v) - 1


def lattice_bound(bw: BrickwallCover, v) -> int:
    return sum(1 for A, x in zip(bw.lattice, v) if A.contains(q(x)))


def scan_bound(cell_list, box: Box, weights: Sequence[Sequence], budget: int = DEFAULT_ATOM_BUDGET,
               extra_breaks: Sequence[Sequence[Fraction]] | None = None):
    """Walk every arrangement atom of `box` cut out by the cell endpoints.

    `weights[a]` is a list of lattice-like objects (with .contains) read on
    axis a; the bound at a point is the number of hits over all axes.
    Returns a dict with worst order, slack, atom count and the first
    violation (lexicographic in atom order) if any.
    """
    dim = len(box)
    axes = []
    for a in range(dim):
        breaks = {c[a][0] for c in cell_list} | {c[a][1] for c in cell_list}
        for w in weights[a]:
            breaks.update(w.points_in(box[a].lo, box[a].hi))
        if extra_breaks is not None:
            breaks.update(extra_breaks[a])
        axes.append(axis_atoms(sorted(breaks), box[a].lo, box[a].hi))
    total = math.prod(len(ax) for ax in axes)
    if total > budget:
        raise BudgetError(f"{total} atoms exceed budget {budget}")
    masks = []
    hits = []
    for a, ax in enumerate(axes):
        col = []
        for x in ax:
            m = 0
            for i, c in enumerate(cell_list):
                lo, hi = c[a]
                if lo <= x <= hi:
                    m |= 1 << i
            col.append(m)
        masks.append(col)
        hits.append([sum(1 for w in weights[a] if w.contains(x)) for x in ax])

    def walk_first(i0: int):
        worst = -1
        fail = None
        uncovered = None
        stack = [(1, masks[0][i0], hits[0][i0], (i0,))]
        while stack:
            a, m, w, idx = stack.pop()
            if a == dim:
                o = m.bit_count() - 1
                if o < 0:
                    if uncovered is None or idx < uncovered:
                        uncovered = idx
                    continue
                worst = max(worst, o)
                if o > w and (fail is None or idx < fail[0]):
                    fail = (idx, o, w)
                continue
            col, hcol = masks[a], hits[a]
            for j in range(len(col) - 1, -1, -1):
                stack.append((a + 1, m & col[j], w + hcol[j], idx + (j,)))
        return worst, fail, uncovered

    results = pmap(walk_first, range(len(axes[0])))
    worst = max(r[0] for r in results)
    fails = [r[1] for r in results if r[1] is not None]
    uncov = [r[2] for r in results if r[2] is not None]

    def point(idx):
        return [axes[a][i] for a, i in enumerate(idx)]

    out = {"atoms": total, "worst_ord": worst, "cells": len(cell_list)}
    if fails:
        idx, o, w = min(fails)
        out["violation"] = {"point": point(idx), "ord": o, "bound": w}
    if uncov:
        out["uncovered"] = point(min(uncov))
    return out


def verify_brickwall(bw: BrickwallCover, budget: int = DEFAULT_ATOM_BUDGET) -> Certificate:
    cl = cells(bw)
    witness: dict = {"d": bw.d, "eps": bw.eps, "shifts": [list(p) for p in bw.shifts],
                     "lattice": [list(A.offsets) for A in bw.lattice], "step": bw.half,
                     "box": [[iv.lo, iv.hi] for iv in bw.box]}
    checks = {}
    mesh = max(max(b - a for a, b in c) for c in cl)
    witness["mesh"] = mesh
    checks["mesh"] = mesh <= bw.eps
    overlap = None
    for i, j in itertools.combinations(range(bw.d), 2):
        p = lattice_meet(bw.lattice[i], bw.lattice[j])
        if p is not None:
            overlap = {"axes": [i, j], "point": p}
            break
    checks["lattice_disjoint"] = overlap is None
    if overlap:
        witness["lattice_overlap"] = overlap
    scan = scan_bound(cl, bw.box, [[A] for A in bw.lattice], budget)
    witness.update(scan)
    checks["covering"] = "uncovered" not in scan
    checks["ord_bound"] = "violation" not in scan
    witness["checks"] = checks
    ok = all(checks.values())
    return Certificate("pass" if ok else "fail", "brickwall", Fraction(scan["worst_ord"]), witness, ok)


def brickwall_from_witness(w: dict) -> BrickwallCover:
    box = tuple(closed(a, b) for a, b in w["box"])
    return build_brickwall(int(w["d"]), q(w["eps"]), box, [(q(t), q(s)) for t, s in w["shifts"]] or None)

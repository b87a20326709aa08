"""Ground spaces, sets and covers, with exact order / refinement / mesh.

Two kinds of space are supported:

* finite spaces, whose points are integer ids (optionally carrying rational
  coordinates or a 1-dimensional cell structure), with sets stored as
  frozensets of ids;
* the ambient box [lo, hi]^m, with sets stored as finite unions of products
  of rational intervals.

Order on a box cover is constant on the cells of the arrangement cut out by
interval endpoints, so suprema are computed by visiting one point per cell.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import BudgetError, CoverError, DomainMismatch, UnsupportedError, ValidationError
from .rational import q

# Stand-in for the empty cover's dimension (minus infinity).
BOTTOM = float("-inf")

DEFAULT_ATOM_BUDGET = 2_000_000
DEFAULT_CANDIDATE_BUDGET = 1_000_000


# ---------------------------------------------------------------- spaces


@dataclass(frozen=True)
class Complex1:
    """A cycle or path of `cells` unit edges, scaled to total length 1.

    Atoms are vertices (ids 0..nv-1) followed by open edges (ids nv..).
    Edge i joins vertex i and vertex i+1 (mod cells on a cycle).
    """

    cells: int
    cyclic: bool = True

    @property
    def nv(self) -> int:
        return self.cells if self.cyclic else self.cells + 1

    @property
    def n_atoms(self) -> int:
        return self.nv + self.cells

    def edge_atom(self, i: int) -> int:
        return self.nv + i

    def is_edge(self, a: int) -> bool:
        return a >= self.nv

    def endpoints(self, i: int) -> tuple[int, int]:
        return i, (i + 1) % self.nv

    def incident_edges(self, v: int) -> list[int]:
        out = []
        if self.cyclic:
            out = [(v - 1) % self.cells, v]
        else:
            if v > 0:
                out.append(v - 1)
            if v < self.cells:
                out.append(v)
        return sorted(set(out))

    def position(self, a: int) -> Fraction:
        if a < self.nv:
            return Fraction(a, self.cells)
        return Fraction(2 * (a - self.nv) + 1, 2 * self.cells)

    def distance(self, a: int, b: int) -> Fraction:
        d = abs(self.position(a) - self.position(b))
        return min(d, 1 - d) if self.cyclic else d

    def closure(self, atoms: Iterable[int]) -> frozenset[int]:
        out = set(atoms)
        for a in list(out):
            if self.is_edge(a):
                out.update(self.endpoints(a - self.nv))
        return frozenset(out)

    def closed_arc(self, start: int, length: int) -> frozenset[int]:
        """Closed arc made of `length` consecutive edges starting at edge `start`."""
        edges = [(start + i) % self.cells for i in range(length)]
        return self.closure(self.edge_atom(e) for e in edges)

    def open_arc(self, start: int, length: int) -> frozenset[int]:
        """Open arc: the edges plus the interior vertices."""
        edges = [(start + i) % self.cells for i in range(length)]
        inner = [(start + i) % self.nv for i in range(1, length)]
        return frozenset([self.edge_atom(e) for e in edges] + inner)


@dataclass(frozen=True)
class GroundSpace:
    n: int
    coords: tuple[tuple[Fraction, ...], ...] | None = None
    table: tuple[tuple[Fraction, ...], ...] | None = None
    complex: Complex1 | None = None

    def __post_init__(self):
        if self.n < 0:
            raise ValidationError("negative point count")
        if self.coords is not None and len(self.coords) != self.n:
            raise ValidationError("coords length differs from point count")
        if self.complex is not None and self.complex.n_atoms != self.n:
            raise ValidationError("complex atom count differs from point count")

    @property
    def points(self) -> range:
        return range(self.n)

    def dist(self, i: int, j: int) -> Fraction:
        if i == j:
            return Fraction(0)
        if self.table is not None:
            return self.table[i][j]
        if self.coords is not None:
            return max(abs(a - b) for a, b in zip(self.coords[i], self.coords[j]))
        if self.complex is not None:
            return self.complex.distance(i, j)
        return Fraction(1)

    def check_metric(self) -> None:
        """Full enumeration of the metric axioms; raises ValidationError."""
        pts = self.points
        for i in pts:
            for j in pts:
                dij = self.dist(i, j)
                if dij < 0 or dij != self.dist(j, i) or (dij == 0) != (i == j):
                    raise ValidationError(f"metric axiom fails at ({i},{j})")
        if self.table is not None and self.coords is not None:
            for i in pts:
                for j in pts:
                    ell = max((abs(a - b) for a, b in zip(self.coords[i], self.coords[j])), default=0)
                    if ell != self.table[i][j]:
                        raise ValidationError(f"metric disagrees with coords at ({i},{j})")

    def everything(self) -> "BitSet":
        return BitSet(frozenset(self.points))


def discrete_space(n: int) -> GroundSpace:
    return GroundSpace(n)


def grid_space(granularity: int, dim: int = 1) -> GroundSpace:
    """The grid {0, 1/g, ..., 1}^dim with the l-infinity metric."""
    axis = [Fraction(i, granularity) for i in range(granularity + 1)]
    coords = tuple(itertools.product(axis, repeat=dim))
    return GroundSpace(len(coords), coords=coords)


def line_space(values: Sequence) -> GroundSpace:
    return GroundSpace(len(values), coords=tuple((q(v),) for v in values))


def cycle_space(cells: int) -> GroundSpace:
    c = Complex1(cells, True)
    return GroundSpace(c.n_atoms, complex=c)


def path_space(cells: int) -> GroundSpace:
    c = Complex1(cells, False)
    return GroundSpace(c.n_atoms, complex=c)


# ---------------------------------------------------------------- sets


@dataclass(frozen=True)
class BitSet:
    members: frozenset[int]
    closed: bool = True

    def contains(self, x) -> bool:
        if not isinstance(x, int) or isinstance(x, bool):
            raise DomainMismatch(f"point-id set queried at {x!r}")
        return x in self.members

    def is_empty(self) -> bool:
        return not self.members


@dataclass(frozen=True, order=True)
class Interval:
    lo: Fraction
    hi: Fraction
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValidationError(f"interval with lo > hi: {self.lo} > {self.hi}")

    def contains(self, t: Fraction) -> bool:
        if t < self.lo or t > self.hi:
            return False
        if t == self.lo and not self.lo_closed:
            return False
        if t == self.hi and not self.hi_closed:
            return False
        return True

    def is_empty(self) -> bool:
        return self.lo == self.hi and not (self.lo_closed and self.hi_closed)

    def intersect(self, other: "Interval") -> "Interval | None":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            return None
        lc = all(iv.lo_closed for iv in (self, other) if iv.lo == lo)
        hc = all(iv.hi_closed for iv in (self, other) if iv.hi == hi)
        iv = Interval(lo, hi, lc, hc)
        return None if iv.is_empty() else iv

    def shift(self, t: Fraction) -> "Interval":
        return Interval(self.lo + t, self.hi + t, self.lo_closed, self.hi_closed)


def closed(lo, hi) -> Interval:
    return Interval(q(lo), q(hi), True, True)


def open_iv(lo, hi) -> Interval:
    return Interval(q(lo), q(hi), False, False)


Box = tuple  # tuple[Interval, ...]


def box_contains(box: Box, x: Sequence[Fraction]) -> bool:
    return all(iv.contains(t) for iv, t in zip(box, x))


def box_intersect(a: Box, b: Box) -> Box | None:
    out = []
    for u, v in zip(a, b):
        w = u.intersect(v)
        if w is None:
            return None
        out.append(w)
    return tuple(out)


@dataclass(frozen=True)
class BoxUnion:
    boxes: tuple[Box, ...]

    @property
    def dim(self) -> int:
        return len(self.boxes[0]) if self.boxes else 0

    def contains(self, x) -> bool:
        if isinstance(x, int):
            raise DomainMismatch(f"box set queried at point id {x}")
        return any(box_contains(b, x) for b in self.boxes)

    def is_empty(self) -> bool:
        return all(any(iv.is_empty() for iv in b) for b in self.boxes)

    @property
    def closed(self) -> bool:
        return all(iv.lo_closed and iv.hi_closed for b in self.boxes for iv in b)

    def clip(self, ambient: Box) -> "BoxUnion":
        out = [c for c in (box_intersect(b, ambient) for b in self.boxes) if c is not None]
        return BoxUnion(tuple(out))


def box_set(*intervals: Interval) -> BoxUnion:
    return BoxUnion((tuple(intervals),))


SetExpr = BitSet | BoxUnion


# ---------------------------------------------------------------- covers


@dataclass(frozen=True)
class Cover:
    sets: tuple
    label: str = ""
    space: GroundSpace | None = field(default=None, compare=False)
    box: Box | None = None

    def __post_init__(self):
        if not isinstance(self.sets, tuple):
            object.__setattr__(self, "sets", tuple(self.sets))

    @property
    def symbolic(self) -> bool:
        return bool(self.sets) and isinstance(self.sets[0], BoxUnion)

    def __len__(self) -> int:
        return len(self.sets)


def bit_cover(space: GroundSpace, sets: Iterable[Iterable[int]], label: str = "") -> Cover:
    return Cover(tuple(BitSet(frozenset(s)) for s in sets), label, space)


def box_cover(sets: Iterable[BoxUnion], box: Box, label: str = "") -> Cover:
    return Cover(tuple(sets), label, None, tuple(box))


def unit_box(dim: int) -> Box:
    return tuple(closed(0, 1) for _ in range(dim))


def ord_at(cover: Cover, x) -> int:
    return -1 + sum(1 for s in cover.sets if s.contains(x))


def _axis_endpoints(cover: Cover, axis: int, extra: Iterable[Fraction] = ()) -> list[Fraction]:
    pts = set(extra)
    for s in cover.sets:
        for b in s.boxes:
            pts.add(b[axis].lo)
            pts.add(b[axis].hi)
    return sorted(pts)


def axis_atoms(breaks: Sequence[Fraction], lo: Fraction, hi: Fraction) -> list[Fraction]:
    """One representative per arrangement cell of [lo, hi]: the breakpoints and
    the midpoints between consecutive ones."""
    pts = sorted({b for b in breaks if lo <= b <= hi} | {lo, hi})
    out = [pts[0]]
    for a, b in zip(pts, pts[1:]):
        out.append((a + b) / 2)
        out.append(b)
    return out


def box_atoms(cover: Cover, others: Sequence[Cover] = (), budget: int = DEFAULT_ATOM_BUDGET):
    """Representative points of every arrangement cell of the ambient box."""
    if cover.box is None:
        raise UnsupportedError("symbolic cover without a bounding box")
    axes = []
    for a, amb in enumerate(cover.box):
        ends: set[Fraction] = set()
        for c in (cover, *others):
            ends.update(_axis_endpoints(c, a))
        axes.append(axis_atoms(sorted(ends), amb.lo, amb.hi))
    total = 1
    for ax in axes:
        total *= len(ax)
    if total > budget:
        raise BudgetError(f"{total} arrangement atoms exceed budget {budget}")
    return itertools.product(*axes)


def sample_points(cover: Cover, others: Sequence[Cover] = ()):
    if cover.symbolic:
        return list(box_atoms(cover, others))
    if cover.space is None:
        raise ValidationError("finite cover without a ground space")
    return list(cover.space.points)


def ord_sup(cover: Cover) -> int:
    return max(ord_at(cover, x) for x in sample_points(cover))


def is_covering(cover: Cover) -> bool:
    return all(ord_at(cover, x) >= 0 for x in sample_points(cover))


def uncovered_point(cover: Cover):
    for x in sample_points(cover):
        if ord_at(cover, x) < 0:
            return x
    return None


def subset(a, b, ambient: Box | None = None) -> bool:
    """Exact inclusion a ⊆ b (within `ambient` for box sets)."""
    if isinstance(a, BitSet):
        if not isinstance(b, BitSet):
            raise DomainMismatch("mixed set kinds")
        return a.members <= b.members
    if ambient is not None:
        a = a.clip(ambient)
    if a.is_empty():
        return True
    m = a.dim
    axes = []
    for ax in range(m):
        ends = {iv.lo for bx in a.boxes for iv in (bx[ax],)} | {bx[ax].hi for bx in a.boxes}
        ends |= {bx[ax].lo for bx in b.boxes} | {bx[ax].hi for bx in b.boxes}
        lo = min(bx[ax].lo for bx in a.boxes)
        hi = max(bx[ax].hi for bx in a.boxes)
        axes.append(axis_atoms(sorted(ends), lo, hi))
    return all(b.contains(x) for x in itertools.product(*axes) if a.contains(x))


def refines(fine: Cover, coarse: Cover) -> bool:
    amb = coarse.box or fine.box
    return all(any(subset(f, c, amb) for c in coarse.sets) for f in fine.sets)


def refinement_failure(fine: Cover, coarse: Cover):
    """Index of the first fine set contained in no coarse set, or None."""
    amb = coarse.box or fine.box
    for i, f in enumerate(fine.sets):
        if not any(subset(f, c, amb) for c in coarse.sets):
            return i
    return None


def joint_refinement(a: Cover, b: Cover) -> Cover:
    out = []
    if a.symbolic:
        for s in a.sets:
            for t in b.sets:
                boxes = tuple(c for c in (box_intersect(x, y) for x in s.boxes for y in t.boxes) if c is not None)
                u = BoxUnion(boxes)
                if boxes and not u.is_empty():
                    out.append(u)
    else:
        for s in a.sets:
            for t in b.sets:
                m = s.members & t.members
                if m:
                    out.append(BitSet(m, s.closed and t.closed))
    return Cover(tuple(out), f"({a.label})v({b.label})", a.space, a.box)


def set_diameter(s, space: GroundSpace | None = None, ambient: Box | None = None) -> Fraction:
    if isinstance(s, BitSet):
        pts = sorted(s.members)
        if len(pts) < 2:
            return Fraction(0)
        return max(space.dist(i, j) for i, j in itertools.combinations(pts, 2))
    if ambient is not None:
        s = s.clip(ambient)
    boxes = [b for b in s.boxes if not any(iv.is_empty() for iv in b)]
    if not boxes:
        return Fraction(0)
    best = Fraction(0)
    for b1 in boxes:
        for b2 in boxes:
            for u, v in zip(b1, b2):
                best = max(best, u.hi - v.lo, v.hi - u.lo)
    return best


def mesh(cover: Cover) -> Fraction:
    """Largest set diameter; empty sets count as diameter 0."""
    if not cover.sets:
        return Fraction(0)
    return max(set_diameter(s, cover.space, cover.box) for s in cover.sets)


# ---------------------------------------------------------------- closed shrinking


def shrink_to_closed(cover: Cover) -> Cover:
    """Closed sets C_i ⊆ U_i that still cover."""
    if cover.symbolic:
        return _shrink_boxes(cover)
    space = cover.space
    if space is None or space.complex is None:
        return Cover(tuple(BitSet(s.members, True) for s in cover.sets), cover.label + "/closed", space)
    cx = space.complex
    out = []
    for s in cover.sets:
        keep = {a for a in s.members if not cx.is_edge(a)}
        for a in s.members:
            if cx.is_edge(a) and set(cx.endpoints(a - cx.nv)) <= s.members:
                keep.add(a)
        out.append(BitSet(frozenset(keep), True))
    res = Cover(tuple(out), cover.label + "/closed", space)
    if not is_covering(res):
        raise CoverError("no closed shrink at this cell resolution; subdivide the complex")
    return res


def _shrink_by(cover: Cover, m: Fraction) -> Cover:
    sets = []
    for s in cover.sets:
        boxes = []
        for b in s.boxes:
            ivs = []
            for iv in b:
                lo = iv.lo if iv.lo_closed else iv.lo + m
                hi = iv.hi if iv.hi_closed else iv.hi - m
                if lo > hi:
                    break
                ivs.append(Interval(lo, hi))
            else:
                boxes.append(tuple(ivs))
        sets.append(BoxUnion(tuple(boxes)))
    return Cover(tuple(sets), cover.label + "/closed", None, cover.box)


def _shrink_boxes(cover: Cover) -> Cover:
    amb = cover.box
    cands: set[Fraction] = set()
    for ax in range(len(amb)):
        ends = set(_axis_endpoints(cover, ax, (amb[ax].lo, amb[ax].hi)))
        for e1 in ends:
            for e2 in ends:
                if e1 > e2:
                    cands.add((e1 - e2) / 2)
                    cands.add(e1 - e2)
    order = sorted(c for c in cands if c > 0)
    # covering is monotone in the margin: binary search for the largest feasible one
    lo, hi = -1, len(order)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if is_covering(_shrink_by(cover, order[mid])):
            lo = mid
        else:
            hi = mid
    if lo >= 0:
        res = _shrink_by(cover, order[lo])
        return Cover(tuple(s.clip(amb) for s in res.sets), res.label, None, amb)
    raise CoverError("no positive shrinking margin keeps the cover")


# ---------------------------------------------------------------- brute-force dim(U)


def _label_choices(cells, u: Cover, inside) -> list[list[int]]:
    choices = []
    for c in cells:
        opts = [i for i, s in enumerate(u.sets) if inside(c, s)]
        if not opts:
            raise CoverError(f"cell {c} lies in no cover set; raise the granularity")
        choices.append(opts)
    return choices


def dim_of_cover_bruteforce(u: Cover, granularity: int | None = None, budget: int = DEFAULT_CANDIDATE_BUDGET):
    """Minimum order over refinements built from grid cells.

    Every candidate assigns each grid cell to one set of `u` that contains it;
    the refinement's sets are the closures of the label classes. Any cover by
    unions of cells can be thinned to such a labelling without raising order.
    Returns (value, witness cover).
    """
    if not u.sets:
        return BOTTOM, u
    if u.symbolic:
        return _bruteforce_boxes(u, granularity or 4, budget)
    space = u.space
    if space.complex is None:
        # discrete: every point is a clopen cell, a partition always exists
        labels = _label_choices(list(space.points), u, lambda p, s: p in s.members)
        classes: dict[int, set[int]] = {}
        for p, opts in zip(space.points, labels):
            classes.setdefault(opts[0], set()).add(p)
        v = bit_cover(space, [classes[k] for k in sorted(classes)], "partition")
        return 0, v
    cx = space.complex
    if granularity is not None and granularity != cx.cells:
        raise UnsupportedError("granularity must match the complex's cell count")
    edges = list(range(cx.cells))
    choices = _label_choices(edges, u, lambda e, s: cx.closed_arc(e, 1) <= s.members)
    total = 1
    for c in choices:
        total *= len(c)
    if total > budget:
        raise BudgetError(f"{total} labellings exceed budget {budget}")
    best, best_lab = None, None
    for lab in itertools.product(*choices):
        worst = max(len({lab[e] for e in cx.incident_edges(v)}) - 1 for v in range(cx.nv))
        if best is None or worst < best:
            best, best_lab = worst, lab
            if best == 0:
                break
    groups: dict[int, list[int]] = {}
    for e, k in enumerate(best_lab):
        groups.setdefault(k, []).append(cx.edge_atom(e))
    v = Cover(tuple(BitSet(cx.closure(groups[k])) for k in sorted(groups)), "cell-labelling", space)
    return best, v


def _bruteforce_boxes(u: Cover, g: int, budget: int):
    amb = u.box
    m = len(amb)
    steps = [(iv.hi - iv.lo) / g for iv in amb]
    cubes = list(itertools.product(range(g), repeat=m))

    def cube_box(c):
        return tuple(Interval(amb[a].lo + c[a] * steps[a], amb[a].lo + (c[a] + 1) * steps[a]) for a in range(m))

    choices = _label_choices(cubes, u, lambda c, s: subset(box_set(*cube_box(c)), s))
    total = 1
    for c in choices:
        total *= len(c)
    if total > budget:
        raise BudgetError(f"{total} labellings exceed budget {budget}")
    index = {c: i for i, c in enumerate(cubes)}
    vertex_cubes = []
    for vtx in itertools.product(range(g + 1), repeat=m):
        inc = []
        for off in itertools.product((0, 1), repeat=m):
            c = tuple(vtx[a] - off[a] for a in range(m))
            if all(0 <= c[a] < g for a in range(m)):
                inc.append(index[c])
        vertex_cubes.append(inc)
    best, best_lab = None, None
    for lab in itertools.product(*choices):
        worst = max(len({lab[i] for i in inc}) - 1 for inc in vertex_cubes)
        if best is None or worst < best:
            best, best_lab = worst, lab
            if best == 0:
                break
    groups: dict[int, list] = {}
    for c, k in zip(cubes, best_lab):
        groups.setdefault(k, []).append(cube_box(c))
    v = Cover(tuple(BoxUnion(tuple(groups[k])) for k in sorted(groups)), "cube-labelling", None, amb)
    return best, v

"""Certificates for dim(U, T) and the checkers built on them.

Upper bounds come from an explicit refinement V (value ord_T(V)). Lower
bounds use either a connectivity argument on 1-dimensional complexes (any
refinement by proper closed sets has a point of order >= 1) followed by an
orbit-averaged Dirac measure, or a fixed-point Dirac measure.
"""
from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import boxgeom
from .certificate import Certificate
from .dynsys import FinitePermSystem, capacity, group_elements, inverse, is_free, orbits, power
from .errors import BudgetError, CoverError, UnsupportedError, ValidationError
from .ergopt import best_orbit, ord_T
from .ground import (BitSet, Cover, bit_cover, dim_of_cover_bruteforce, joint_refinement, mesh,
                     ord_at, refinement_failure, shrink_to_closed)


class RefinementError(ValidationError):
    def __init__(self, index: int):
        super().__init__(f"set {index} of the refinement lies in no set of the cover")
        self.index = index


def cover_witness(v: Cover) -> list[list[int]]:
    return [sorted(s.members) for s in v.sets]


def dim_U_T_upper(sys: FinitePermSystem, u: Cover, v: Cover) -> Certificate:
    bad = refinement_failure(v, u)
    if bad is not None:
        raise RefinementError(bad)
    val = ord_T(sys, v)
    orb = best_orbit(sys, [ord_at(v, x) for x in range(sys.n)])
    w = {"system": sys.label, "refinement": cover_witness(v), "maximising_orbit": list(orb)}
    return Certificate("upper_bound", "dim_U_T", val, w, True)


def replay_upper(sys: FinitePermSystem, u: Cover, cert: Certificate) -> Fraction:
    v = bit_cover(sys.space, cert.witness["refinement"])
    return dim_U_T_upper(sys, u, v).value


# ------------------------------------------------------------ 1-complexes


def _cellular(sys: FinitePermSystem) -> None:
    """Each generator must be an automorphism of the complex that never
    reverses an edge onto itself (so open-edge orbits match atom orbits)."""
    cx = sys.space.complex
    if cx is None:
        raise UnsupportedError("the space is not a 1-dimensional complex")
    for g in group_elements(sys):
        for e in range(cx.cells):
            a, b = cx.endpoints(e)
            img = g[cx.edge_atom(e)]
            if not cx.is_edge(img) or any(cx.is_edge(g[v]) for v in (a, b)):
                raise UnsupportedError("action does not map cells to cells")
            if {g[a], g[b]} != set(cx.endpoints(img - cx.nv)):
                raise UnsupportedError("action breaks edge incidence")
            if img == cx.edge_atom(e) and g[a] != a:
                raise UnsupportedError("an element reverses an edge onto itself")


def _connected(cx) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for e in cx.incident_edges(v):
            for w in cx.endpoints(e):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
    return len(seen) == cx.nv


def dim_U_T_lower_dim1(sys: FinitePermSystem, u: Cover) -> Certificate:
    _cellular(sys)
    cx = sys.space.complex
    if not _connected(cx):
        raise UnsupportedError("complex is not connected")
    missing = []
    for s in u.sets:
        out = [x for x in sys.space.points if x not in s.members]
        if not out:
            raise UnsupportedError("a cover set is the whole space; dim(U) = 0")
        missing.append(out[0])
    k = max(len(o) for o in orbits(sys))
    w = {"system": sys.label, "connected": True, "point_outside_each_set": missing, "max_orbit": k,
         "dim_U": 1,
         "argument": "no refining set is the whole connected complex, so some point has order >= 1; "
                     "the uniform measure on its orbit gives at least 1/max_orbit"}
    return Certificate("lower_bound", "dim_U_T", Fraction(1, k), w, True)


def endpoint_avoiding_refinement(sys: FinitePermSystem, u: Cover, max_steps: int = 200_000) -> Cover:
    """Closed arcs whose shared endpoints lie in pairwise distinct orbits,
    each arc inside some set of u. Lexicographically first solution."""
    cx = sys.space.complex
    if cx is None or not cx.cyclic:
        raise UnsupportedError("endpoint-avoiding arcs are built on cycles")
    orbit_of = {}
    for i, o in enumerate(orbits(sys)):
        for x in o:
            orbit_of[x] = i
    g = cx.cells
    fits = {}
    for start in range(g):
        for length in range(1, g):
            arc = cx.closed_arc(start, length)
            fits[start, length] = any(arc <= s.members for s in u.sets)
    steps = 0
    for c0 in range(g):
        path = [c0]

        def dfs(pos: int, used: set) -> bool:
            nonlocal steps
            for length in range(min(g - 1, g - (pos - c0)), 0, -1):
                steps += 1
                if steps > max_steps:
                    raise BudgetError("endpoint-avoiding search budget exhausted")
                nxt = pos + length
                if not fits[pos % g, length]:
                    continue
                if nxt - c0 == g:
                    if len(path) > 1 or length < g:
                        return True
                    continue
                o = orbit_of[nxt % g]
                if o in used:
                    continue
                path.append(nxt)
                used.add(o)
                if dfs(nxt, used):
                    return True
                used.discard(o)
                path.pop()
            return False

        if dfs(c0, {orbit_of[c0]}):
            cuts = path + [c0 + g]
            arcs = [cx.closed_arc(a % g, b - a) for a, b in zip(cuts, cuts[1:])]
            return bit_cover(sys.space, arcs, "endpoint-avoiding arcs")
    raise UnsupportedError("no endpoint-avoiding refinement at this resolution; subdivide the complex")


def thm71_check(sys: FinitePermSystem, u: Cover | None = None) -> Certificate:
    from .fixtures import arc_cover

    _cellular(sys)
    free, fixed = is_free(sys)
    if not free:
        raise UnsupportedError(f"action is not free (point {fixed} has a nontrivial stabiliser)")
    u = u or arc_cover(sys.space)
    lower = dim_U_T_lower_dim1(sys, u)
    v = endpoint_avoiding_refinement(sys, u)
    upper = dim_U_T_upper(sys, u, v)
    order = len(group_elements(sys))
    expected = Fraction(1, order)
    eq = lower.value == upper.value
    w = {"system": sys.label, "group_order": order, "dim_X": 1, "formula_value": expected,
         "lower": lower.to_dict(), "upper": upper.to_dict(), "gap": upper.value - lower.value}
    ok = eq and upper.value == expected
    return Certificate("equality" if eq else "upper_bound", "dim_X_T", upper.value, w, ok,
                       lower=lower.value, upper=upper.value)


# ------------------------------------------------------------ lemma on disjoint translates


def act(sys: FinitePermSystem, gamma) -> tuple[int, ...]:
    """The permutation T_gamma: gamma is an int (power of T) or a permutation tuple."""
    if isinstance(gamma, int):
        return power(sys.T, gamma)
    return tuple(gamma)


def lemma92_check(sys: FinitePermSystem, u: Cover, k_sets: dict, d: int) -> Certificate:
    """k_sets maps (j, gamma) to a point set K_{j,gamma}, with j in 0..d-1."""
    js = sorted({j for j, _ in k_sets})
    witness: dict = {"d": d, "families": len(js)}
    if any(not (0 <= j < d) for j in js):
        witness["bad_index"] = [j for j in js if not (0 <= j < d)]
        return Certificate("fail", "ord_T", None, witness, False, stage="indices")
    members = {key: (s.members if isinstance(s, BitSet) else frozenset(s)) for key, s in k_sets.items()}
    for x in range(sys.n):
        lhs = ord_at(u, x)
        rhs = sum(1 for K in members.values() if x in K)
        if lhs > rhs:
            witness.update(point=x, ord=lhs, count=rhs)
            return Certificate("fail", "ord_T", None, witness, False, stage="pointwise")
    for j in js:
        keys = sorted((key for key in members if key[0] == j), key=repr)
        images = {}
        for key in keys:
            p = act(sys, key[1])
            images[key] = frozenset(p[x] for x in members[key])
        for a, b in itertools.combinations(keys, 2):
            common = images[a] & images[b]
            if common:
                witness.update(family=j, translates=[repr(a[1]), repr(b[1])], point=min(common))
                return Certificate("fail", "ord_T", None, witness, False, stage="disjoint_translates")
    direct = ord_T(sys, u)
    witness["direct_ord_T"] = direct
    if direct > d:
        witness["soundness"] = False
        return Certificate("fail", "ord_T", None, witness, False, stage="soundness")
    return Certificate("upper_bound", "ord_T", Fraction(d), witness, True)


# ------------------------------------------------------------ cubical shift


@dataclass(frozen=True)
class Cylinder:
    """{x : x[axis] in lattice} on ([0,1]^d)^{Z/n}, axis = (l, h)."""

    axis: tuple[int, int]
    lattice: boxgeom.LatticeSet

    def translate(self, g: int, n: int) -> "Cylinder":
        # (T_g x)_h = x_{h-g}: coordinate h of x moves to coordinate h + g
        l, h = self.axis
        return Cylinder((l, (h + g) % n), self.lattice)


def cubical_shift_upper(d: int, n: int, eps, budget: int = boxgeom.DEFAULT_ATOM_BUDGET,
                        direct_budget: int = 40_000_000) -> Certificate:
    eps = Fraction(eps)
    D = d * n
    bw = boxgeom.build_brickwall(D, eps)

    def ax(l: int, h: int) -> int:
        return h * d + l

    lat = {(l, h): bw.lattice[ax(l, h)] for l in range(d) for h in range(n)}
    # A_{j,gamma} is the lattice set of coordinate (j, -gamma); K_{j,gamma} reads that coordinate
    K = {(j, g): Cylinder((j, (-g) % n), lat[(j, (-g) % n)]) for j in range(d) for g in range(n)}
    witness: dict = {"d": d, "n": n, "eps": eps, "shifts": [list(p) for p in bw.shifts]}
    checks = {}
    overlap = None
    for j in range(d):
        imgs = {g: K[(j, g)].translate(g, n) for g in range(n)}
        if any(c.axis != (j, 0) for c in imgs.values()):
            overlap = {"family": j, "reason": "translate not on coordinate (j, 0)"}
            break
        for a, b in itertools.combinations(range(n), 2):
            p = boxgeom.lattice_meet(imgs[a].lattice, imgs[b].lattice)
            if p is not None:
                overlap = {"family": j, "translates": [a, b], "value": p}
                break
    checks["disjoint_translates"] = overlap is None
    if overlap:
        witness["overlap"] = overlap
    cl = boxgeom.cells(bw)
    weights = [[] for _ in range(D)]
    for cyl in K.values():
        weights[ax(*cyl.axis)].append(cyl.lattice)
    scan = boxgeom.scan_bound(cl, bw.box, weights, budget)
    witness["scan"] = {k: v for k, v in scan.items()}
    checks["covering"] = "uncovered" not in scan
    checks["pointwise_bound"] = "violation" not in scan
    m = max(max(b - a for a, b in c) for c in cl)
    witness["mesh"] = m
    checks["mesh_below_eps"] = m < eps
    direct = _direct_orbit_average(bw, d, n, cl, direct_budget)
    witness["direct_ord_T"] = direct if direct is not None else "skipped (atom budget)"
    if direct is not None:
        checks["direct_le_d"] = direct <= d
    lower = _fixed_point_lower(bw, d, n, cl)
    witness["fixed_point_lower"] = lower
    witness["checks"] = checks
    ok = all(checks.values())
    lo = Fraction(lower["value"])
    kind = "equality" if ok and lo == d else ("upper_bound" if ok else "fail")
    return Certificate(kind, "dim_cubical_shift", Fraction(d), witness, ok, lower=lo, upper=Fraction(d))


def _direct_orbit_average(bw, d: int, n: int, cl, budget: int):
    """max_x (1/n) sum_g ord(U, T_g x), exact on the shift-symmetric arrangement.

    Orders are tabulated on each axis's own arrangement (every cell is a box
    of atom ranges there), then read off on the common refinement shared by
    the coordinates that the shift permutes.
    """
    D = d * n
    zero, one = Fraction(0), Fraction(1)
    own = []
    for a in range(D):
        br = {c[a][0] for c in cl} | {c[a][1] for c in cl}
        br |= set(bw.lattice[a].points_in(zero, one))
        own.append(sorted(x for x in br | {zero, one} if 0 <= x <= 1))
    merged = [sorted(set().union(*(own[h * d + l] for h in range(n)))) for l in range(d)]
    shape = tuple(len(merged[a % d]) * 2 - 1 for a in range(D))
    if math.prod(shape) > budget:
        return None
    ords = np.full(tuple(2 * len(b) - 1 for b in own), -1, dtype=np.int8)
    for c in cl:
        sl = []
        for a in range(D):
            pts = own[a]
            lo = 2 * bisect.bisect_left(pts, max(c[a][0], zero))
            hi = 2 * bisect.bisect_left(pts, min(c[a][1], one))
            sl.append(slice(lo, hi + 1))
        ords[tuple(sl)] += 1
    idx = []
    for a in range(D):
        pts = own[a]
        col = []
        for x in boxgeom.axis_atoms(merged[a % d], zero, one):
            j = bisect.bisect_left(pts, x)
            col.append(2 * j if j < len(pts) and pts[j] == x else 2 * j - 1)
        idx.append(col)
    table = ords[np.ix_(*idx)].astype(np.int16)
    acc = np.zeros(shape, dtype=np.int16)
    for g in range(n):
        # result axis a reads coordinate a shifted by g
        perm = [((a // d + g) % n) * d + a % d for a in range(D)]
        acc += np.transpose(table, perm)
    return Fraction(int(acc.max()), n)


def _fixed_point_lower(bw, d: int, n: int, cl) -> dict:
    """Shift-fixed points are constant in h. No cell contains both (0,..,0) and
    (1,..,1) once mesh < 1, so every refinement restricted to the connected
    set of fixed diagonal points has a point of order >= 1; its Dirac mass
    is invariant, giving dim >= 1."""
    D = d * n
    zero, one = (Fraction(0),) * D, (Fraction(1),) * D
    both = [c for c in cl if all(a <= 0 <= b for a, b in c) and all(a <= 1 <= b for a, b in c)]
    breaks = sorted({v for c in cl for a in range(D) for v in c[a] if 0 <= v <= 1})
    best = None
    for t in boxgeom.axis_atoms(breaks, Fraction(0), Fraction(1)):
        o = boxgeom.brickwall_ord(bw, (t,) * D)
        if best is None or o > best[1]:
            best = (t, o)
    ok = not both and best[1] >= 1
    return {"value": Fraction(1) if ok else Fraction(0), "no_cell_spans_diagonal": not both,
            "diagonal_point": best[0], "diagonal_ord": best[1]}


# ------------------------------------------------------------ small boundary search


def boundary(space, s: BitSet) -> frozenset[int]:
    """Combinatorial boundary of a closed cell-set: its vertices adjacent to an
    edge outside it. Empty on discrete spaces (all sets clopen)."""
    cx = space.complex
    if cx is None:
        return frozenset()
    out = set()
    for v in s.members:
        if v < cx.nv and any(cx.edge_atom(e) not in s.members for e in cx.incident_edges(v)):
            out.add(v)
    return frozenset(out)


def sbp_witness_search(sys: FinitePermSystem, eps, max_steps: int = 2_000_000) -> Certificate:
    eps = Fraction(eps)
    space = sys.space
    if space.complex is None:
        v = bit_cover(space, [{x} for x in space.points], "singletons")
        bnd = frozenset().union(*(boundary(space, s) for s in v.sets)) if v.sets else frozenset()
        cap = capacity(sys, bnd)
        m = mesh(v)
        ok = m < eps and cap < eps
        w = {"cover": cover_witness(v), "mesh": m, "boundary_capacity": cap, "ord_T": ord_T(sys, v)}
        return Certificate("pass" if ok else "inconclusive", "sbp_witness", cap, w, ok)
    cx = space.complex
    if not cx.cyclic:
        raise UnsupportedError("boundary search is implemented on cycles")
    g = cx.cells
    maxlen = math.ceil(eps * g) - 1  # closed arc of `length` cells has diameter length/g < eps
    orb = {}
    for o in orbits(sys):
        for x in o:
            orb[x] = o
    limit = {}
    for o in orbits(sys):
        limit[o] = math.ceil(eps * len(o)) - 1  # |S ∩ O| / |O| < eps
    steps = 0
    if maxlen < 1:
        w = {"reason": "no cell is shorter than eps", "exhaustive": True}
        return Certificate("inconclusive", "sbp_witness", None, w, False)
    for c0 in range(g):
        if limit[orb[c0]] < 1:
            continue
        cuts = [c0]
        used = {orb[c0]: 1}

        def dfs(pos: int) -> bool:
            nonlocal steps
            for length in range(1, maxlen + 1):
                steps += 1
                if steps > max_steps:
                    raise BudgetError("boundary search budget exhausted")
                nxt = pos + length
                if nxt - c0 == g:
                    return True
                if nxt - c0 > g:
                    return False
                o = orb[nxt % g]
                if used.get(o, 0) >= limit[o]:
                    continue
                used[o] = used.get(o, 0) + 1
                cuts.append(nxt)
                if dfs(nxt):
                    return True
                cuts.pop()
                used[o] -= 1
            return False

        if dfs(c0):
            pts = cuts + [c0 + g]
            v = bit_cover(space, [cx.closed_arc(a % g, b - a) for a, b in zip(pts, pts[1:])], "arcs")
            bnd = frozenset().union(*(boundary(space, s) for s in v.sets))
            cap = capacity(sys, bnd)
            m = mesh(v)
            w = {"cover": cover_witness(v), "mesh": m, "boundary_capacity": cap, "ord_T": ord_T(sys, v)}
            ok = m < eps and cap < eps
            return Certificate("pass" if ok else "inconclusive", "sbp_witness", cap, w, ok)
    w = {"reason": "no arc cover with mesh < eps has boundary capacity < eps", "exhaustive": True,
         "steps": steps, "cells": g}
    return Certificate("inconclusive", "sbp_witness", None, w, False)


# ------------------------------------------------------------ URP towers


@dataclass(frozen=True)
class UrpTowers:
    bases: tuple[BitSet, ...]
    shapes: tuple[tuple, ...]
    eps: Fraction


def urp_check(sys: FinitePermSystem, towers: UrpTowers, closed: bool = False) -> Certificate:
    bases = towers.bases
    if closed:
        bases = shrink_to_closed(Cover(bases, space=sys.space)).sets
    pieces = []
    for i, (b, shape) in enumerate(zip(bases, towers.shapes)):
        for gamma in shape:
            p = act(sys, gamma)
            pieces.append(((i, repr(gamma)), frozenset(p[x] for x in b.members)))
    w: dict = {"pieces": len(pieces), "closed": closed}
    for (ka, a), (kb, b) in itertools.combinations(pieces, 2):
        common = a & b
        if common:
            w.update(overlap=[list(ka), list(kb)], point=min(common))
            return Certificate("fail", "urp", None, w, False, stage="disjointness")
    covered = frozenset().union(*(p for _, p in pieces)) if pieces else frozenset()
    leftover = frozenset(x for x in range(sys.n) if x not in covered)
    cap = capacity(sys, leftover)
    w["leftover"] = sorted(leftover)
    w["leftover_capacity"] = cap
    ok = cap < towers.eps
    return Certificate("pass" if ok else "fail", "urp", cap, w, ok, stage=None if ok else "leftover")


# ------------------------------------------------------------ mean dimension comparison


def _translate_cover(sys: FinitePermSystem, u: Cover, p: Sequence[int]) -> Cover:
    """T_gamma^{-1}(U) for T_gamma = p."""
    inv = inverse(p)
    return Cover(tuple(BitSet(frozenset(inv[x] for x in s.members)) for s in u.sets), u.label, u.space)


def _cover_dim(w: Cover) -> int:
    """min ord over cell-built refinements; on a cycle any labelling has order <= 1,
    so the value is 0 iff one set is everything."""
    try:
        val, _ = dim_of_cover_bruteforce(w, budget=50_000)
        return int(val)
    except BudgetError:
        everything = frozenset(w.space.points)
        return 0 if any(s.members == everything for s in w.sets) else 1


def mdim_dim_compare(sys: FinitePermSystem, u: Cover | None = None, n: int = 24) -> Certificate:
    from .fixtures import arc_cover, singleton_cover

    space = sys.space
    if space.complex is None:
        v = singleton_cover(space)
        up = ord_T(sys, v)
        w = {"system": sys.label, "mdim_estimate": Fraction(0), "dim_lower": Fraction(0), "dim_upper": up}
        return Certificate("equality" if up == 0 else "upper_bound", "mdim_vs_dim", Fraction(0), w, up >= 0,
                           lower=Fraction(0), upper=up)
    u = u or arc_cover(space)
    if sys.group == "finite":
        F = group_elements(sys)
    elif sys.group == "Z":
        F = [power(sys.T, i) for i in range(n)]
    else:
        raise UnsupportedError("mean dimension comparison needs Z or a finite group")
    distinct = sorted(set(F))
    joint = _translate_cover(sys, u, distinct[0])
    for p in distinct[1:]:
        joint = joint_refinement(joint, _translate_cover(sys, u, p))
    D = _cover_dim(joint)
    estimate = Fraction(D, len(F))
    lower = dim_U_T_lower_dim1(sys, u)
    v = endpoint_avoiding_refinement(sys, u)
    upper = dim_U_T_upper(sys, u, v)
    w = {"system": sys.label, "folner_size": len(F), "joint_cover_dim": D, "mdim_estimate": estimate,
         "dim_lower": lower.value, "dim_upper": upper.value}
    ok = estimate <= upper.value
    eq = estimate == lower.value == upper.value
    return Certificate("equality" if eq else "upper_bound", "mdim_vs_dim", estimate, w, ok,
                       lower=lower.value, upper=upper.value)

"""Standard systems and seeded random generators."""
from __future__ import annotations

import random
from fractions import Fraction

from .dynsys import FinitePermSystem, compose, z_system
from .ground import BitSet, Cover, GroundSpace, bit_cover, cycle_space, discrete_space, line_space


def rotation_perm(cells: int, step: int) -> tuple[int, ...]:
    """Rotation of a cycle complex by `step` cells, acting on vertex and edge atoms."""
    return tuple([(v + step) % cells for v in range(cells)] + [cells + (e + step) % cells for e in range(cells)])


def polygon_rotation(order: int, cells: int = 12, label: str | None = None) -> FinitePermSystem:
    """Z/order acting on the cells-gon by rotation through cells/order edges."""
    if cells % order:
        raise ValueError("rotation order must divide the cell count")
    return FinitePermSystem(cycle_space(cells), (rotation_perm(cells, cells // order),), "finite",
                            label=label or f"rotation Z/{order} on {cells}-gon")


def antipodal(cells: int = 12) -> FinitePermSystem:
    return polygon_rotation(2, cells, f"antipodal Z/2 on {cells}-gon")


def trivial_z(cells: int = 12) -> FinitePermSystem:
    sp = cycle_space(cells)
    return FinitePermSystem(sp, (tuple(range(sp.n)),), "Z", label=f"trivial Z on {cells}-gon")


def arc_cover(space: GroundSpace, arcs: int = 4, overlap: int = 2) -> Cover:
    """Open arcs around a cycle, each spanning cells/arcs edges plus `overlap` on each side."""
    cx = space.complex
    base = cx.cells // arcs
    sets = [cx.open_arc((i * base - overlap) % cx.cells, base + 2 * overlap) for i in range(arcs)]
    return bit_cover(space, sets, f"{arcs}-arc cover")


def singleton_cover(space: GroundSpace) -> Cover:
    return bit_cover(space, [{x} for x in space.points], "singletons")


# ------------------------------------------------------------ random


def random_perm(rng: random.Random, n: int) -> list[int]:
    p = list(range(n))
    rng.shuffle(p)
    return p


def random_z_system(rng: random.Random, max_points: int = 200, coords: bool = False) -> FinitePermSystem:
    n = rng.randint(1, max_points)
    space = None
    if coords:
        # distinct coordinates keep the metric a metric
        space = line_space([Fraction(i, n) for i in rng.sample(range(n + 1), n)])
    return z_system(random_perm(rng, n), space, label=f"random Z, {n} points")


BASE_GROUPS = {
    "Z2": [(1, 0)],
    "Z3": [(1, 2, 0)],
    "Z4": [(1, 2, 3, 0)],
    "Z6": [(1, 2, 3, 4, 5, 0)],
    "Z2xZ2": [(1, 0, 3, 2), (2, 3, 0, 1)],
    "S3": [(1, 2, 0), (1, 0, 2)],
    "D4": [(1, 2, 3, 0), (3, 2, 1, 0)],
}


def closure(gens) -> list[tuple[int, ...]]:
    ident = tuple(range(len(gens[0])))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                r = compose(g, p)
                if r not in seen:
                    seen.add(r)
                    nxt.append(r)
        frontier = nxt
    return sorted(seen)


def random_finite_group_system(rng: random.Random, max_points: int = 60) -> FinitePermSystem:
    """A finite group acting on a disjoint union of coset spaces G/H."""
    name = rng.choice(sorted(BASE_GROUPS))
    gens = BASE_GROUPS[name]
    G = closure(gens)
    index = {g: i for i, g in enumerate(G)}
    blocks = []
    total = 0
    for _ in range(rng.randint(1, 3)):
        h = rng.choice(G)
        H = closure([h])
        cosets = sorted({tuple(sorted(index[compose(g, x)] for x in H)) for g in G})
        if total + len(cosets) > max_points:
            break
        blocks.append((H, cosets))
        total += len(cosets)
    if not blocks:
        H = G
        blocks.append((H, [tuple(range(len(G)))]))
        total = 1
    perms = []
    for s in gens:
        p = []
        offset = 0
        for H, cosets in blocks:
            where = {c: i for i, c in enumerate(cosets)}
            for c in cosets:
                img = tuple(sorted(index[compose(s, G[i])] for i in c))
                p.append(offset + where[img])
            offset += len(cosets)
        perms.append(tuple(p))
    return FinitePermSystem(discrete_space(total), tuple(perms), "finite", label=f"{name} on {total} cosets")


def random_subset(rng: random.Random, n: int, p: float = 0.5) -> frozenset[int]:
    return frozenset(x for x in range(n) if rng.random() < p)


def random_bit_cover(rng: random.Random, space: GroundSpace, sets: int) -> Cover:
    """Random sets, patched so every point is covered."""
    out = [set() for _ in range(sets)]
    for x in space.points:
        for i in rng.sample(range(sets), rng.randint(1, sets)):
            out[i].add(x)
    return bit_cover(space, out, f"random {sets}-set cover")


def random_metric_system(rng: random.Random, max_points: int = 50) -> FinitePermSystem:
    """Random Z-system whose points sit at distinct grid positions of [0,1]."""
    n = rng.randint(1, max_points)
    grid = 2 * max_points
    pos = rng.sample(range(grid + 1), n)
    space = line_space([Fraction(p, grid) for p in pos])
    return z_system(random_perm(rng, n), space, label=f"random metric Z, {n} points")

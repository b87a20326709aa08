"""Finite permutation systems, subshifts of finite type, orbits, capacity and
fiber products.

On a finite system the invariant probability measures are exactly the convex
combinations of orbit-uniform measures, so suprema over measures are maxima
over orbits.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .certificate import Certificate
from .errors import UnsupportedError, ValidationError
from .ground import BitSet, GroundSpace, discrete_space
from .lp import maximise
from .rational import lcm_all, q

GROUPS = ("Z", "Zk", "finite", "free")
AMENABLE = ("Z", "Zk", "finite")


def compose(p: Sequence[int], r: Sequence[int]) -> tuple[int, ...]:
    """(p∘r)(x) = p[r[x]]."""
    return tuple(p[i] for i in r)


def inverse(p: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


def power(p: Sequence[int], m: int) -> tuple[int, ...]:
    n = len(p)
    if m < 0:
        p, m = inverse(p), -m
    out = tuple(range(n))
    base = tuple(p)
    while m:
        if m & 1:
            out = compose(base, out)
        base = compose(base, base)
        m >>= 1
    return out


@dataclass(frozen=True)
class FinitePermSystem:
    space: GroundSpace
    generators: tuple[tuple[int, ...], ...]
    group: str = "Z"
    isometry: bool = False
    label: str = ""

    def __post_init__(self):
        n = self.space.n
        gens = tuple(tuple(g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        if self.group not in GROUPS:
            raise ValidationError(f"unknown group tag {self.group!r}")
        for g in gens:
            if len(g) != n or sorted(g) != list(range(n)):
                raise ValidationError("generator is not a permutation of the points")
        if self.group == "Z" and len(gens) != 1:
            raise ValidationError("a Z-action has exactly one generator")
        if self.group == "Zk":
            for a, b in itertools.combinations(gens, 2):
                if compose(a, b) != compose(b, a):
                    raise ValidationError("Z^k generators do not commute")
        if self.group == "free" and len(gens) > 2:
            raise UnsupportedError("free groups on at most two generators")
        if self.isometry:
            for g in gens:
                for i in range(n):
                    for j in range(n):
                        if self.space.dist(g[i], g[j]) != self.space.dist(i, j):
                            raise ValidationError(f"generator is not an isometry at ({i},{j})")

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def T(self) -> tuple[int, ...]:
        return self.generators[0]


def z_system(perm: Sequence[int], space: GroundSpace | None = None, label: str = "") -> FinitePermSystem:
    return FinitePermSystem(space or discrete_space(len(perm)), (tuple(perm),), "Z", label=label)


def finite_group_system(gens: Sequence[Sequence[int]], space: GroundSpace | None = None,
                        label: str = "") -> FinitePermSystem:
    n = len(gens[0])
    return FinitePermSystem(space or discrete_space(n), tuple(tuple(g) for g in gens), "finite", label=label)


def orbits(sys: FinitePermSystem) -> list[tuple[int, ...]]:
    seen = [False] * sys.n
    out = []
    for x in range(sys.n):
        if seen[x]:
            continue
        orb = {x}
        stack = [x]
        while stack:
            y = stack.pop()
            for g in sys.generators:
                z = g[y]
                if z not in orb:
                    orb.add(z)
                    stack.append(z)
        for y in orb:
            seen[y] = True
        out.append(tuple(sorted(orb)))
    return out


def orbit_map(sys: FinitePermSystem) -> list[int]:
    idx = [0] * sys.n
    for k, orb in enumerate(orbits(sys)):
        for x in orb:
            idx[x] = k
    return idx


def period(sys: FinitePermSystem) -> int:
    """lcm of the cycle lengths of a Z-action (the order of T)."""
    if sys.group != "Z":
        raise UnsupportedError("period is defined for Z-actions")
    return lcm_all(len(o) for o in orbits(sys)) if sys.n else 1


def group_elements(sys: FinitePermSystem, cap: int = 100_000) -> list[tuple[int, ...]]:
    """The permutation group generated by the action, identity first then sorted."""
    ident = tuple(range(sys.n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for g in sys.generators:
                r = compose(g, p)
                if r not in seen:
                    seen.add(r)
                    nxt.append(r)
                    if len(seen) > cap:
                        raise UnsupportedError("generated group too large")
        frontier = nxt
    rest = sorted(seen - {ident})
    return [ident] + rest


def is_free(sys: FinitePermSystem) -> tuple[bool, int | None]:
    """Free action of the generated group: only the identity fixes a point.
    An infinite group acting on finitely many points has a kernel, so it is never free."""
    if sys.group != "finite":
        return False, 0
    for p in group_elements(sys)[1:]:
        for x in range(sys.n):
            if p[x] == x:
                return False, x
    return True, None


def _members(a) -> frozenset[int]:
    if isinstance(a, BitSet):
        return a.members
    return frozenset(a)


def capacity(sys, a) -> Fraction:
    if isinstance(sys, SftSystem):
        return sft_capacity(sys, a)
    A = _members(a)
    best = Fraction(0)
    for orb in orbits(sys):
        best = max(best, Fraction(sum(1 for x in orb if x in A), len(orb)))
    return best


def orbit_measure(orb: Sequence[int], n: int) -> tuple[Fraction, ...]:
    w = [Fraction(0)] * n
    for x in orb:
        w[x] = Fraction(1, len(orb))
    return tuple(w)


@dataclass(frozen=True)
class InvariantMeasure:
    weights: tuple[Fraction, ...]

    def integrate(self, f: Sequence) -> Fraction:
        return sum((w * q(v) for w, v in zip(self.weights, f)), Fraction(0))

    def mass(self, a) -> Fraction:
        A = _members(a)
        return sum((w for x, w in enumerate(self.weights) if x in A), Fraction(0))


def is_invariant(sys: FinitePermSystem, weights: Sequence[Fraction]) -> bool:
    if any(w < 0 for w in weights) or sum(weights) != 1:
        return False
    return all(weights[g[x]] == weights[x] for g in sys.generators for x in range(sys.n))


def ball(space: GroundSpace, k: Iterable[int], delta: Fraction) -> frozenset[int]:
    """Open delta-neighbourhood of K."""
    K = list(k)
    return frozenset(x for x in space.points if any(space.dist(x, y) < delta for y in K))


def capacity_ball_limit_check(sys: FinitePermSystem, k, deltas: Sequence) -> Certificate:
    K = _members(k)
    deltas = [q(d) for d in deltas]
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ValidationError("deltas must be strictly decreasing")
    outside = [x for x in sys.space.points if x not in K]
    gap = min((sys.space.dist(x, y) for x in outside for y in K), default=None)
    target = capacity(sys, K)
    series = [capacity(sys, ball(sys.space, K, d)) for d in deltas]
    monotone = all(b <= a for a, b in zip(series, series[1:]))
    lower = all(c >= target for c in series)
    below = [i for i, d in enumerate(deltas) if gap is None or d <= gap]
    stable = bool(below) and all(series[i] == target for i in below)
    ok = monotone and lower and stable
    witness = {"deltas": deltas, "capacities": series, "capacity_K": target,
               "min_positive_distance": gap, "stable_from": below[0] if below else None,
               "checks": {"monotone": monotone, "above_limit": lower, "stabilised": stable}}
    return Certificate("pass" if ok else "fail", "capacity_ball_limit", target, witness, ok)


# ------------------------------------------------------------ fiber products


def _as_vectors(f, n: int) -> list[tuple]:
    """Observable values per point as hashable tuples."""
    if hasattr(f, "components"):
        return [tuple(c[x] for c in f.components) for x in range(n)]
    out = []
    for v in f:
        out.append(tuple(v) if isinstance(v, (tuple, list)) else (v,))
    return out


def orbit_classes(sys: FinitePermSystem, f) -> list[int]:
    """Class ids of f^Γ: x ~ y iff f(T_g x) = f(T_g y) for every group element g.

    Coarsest generator-stable refinement of the level sets of f.
    """
    vals = _as_vectors(f, sys.n)
    first = {v: i for i, v in enumerate(sorted(set(vals)))}
    label = [first[v] for v in vals]
    invs = [inverse(g) for g in sys.generators]
    while True:
        sig = [(label[x],) + tuple(label[g[x]] for g in sys.generators) + tuple(label[g[x]] for g in invs)
               for x in range(sys.n)]
        order = {s: i for i, s in enumerate(sorted(set(sig)))}
        new = [order[s] for s in sig]
        if len(order) == len(set(label)):
            return new
        label = new


@dataclass(frozen=True)
class FiberProduct:
    base: FinitePermSystem
    values: tuple
    variant: str
    pairs: frozenset = field(repr=False)

    def contains(self, a: int, b: int) -> bool:
        return (a, b) in self.pairs


def fiber_product(sys: FinitePermSystem, f, d: int | None = None, variant: str = "orbit") -> FiberProduct:
    vals = _as_vectors(f, sys.n)
    if d is not None and any(len(v) != d for v in vals):
        raise ValidationError("observable has the wrong number of components")
    if variant == "pointwise":
        key = vals
    elif variant == "orbit":
        key = orbit_classes(sys, f)
    else:
        raise ValidationError(f"unknown fiber product variant {variant!r}")
    buckets: dict = {}
    for x, k in enumerate(key):
        buckets.setdefault(k, []).append(x)
    pairs = frozenset((a, b) for grp in buckets.values() for a in grp for b in grp)
    return FiberProduct(sys, tuple(vals), variant, pairs)


def product_orbit(sys: FinitePermSystem, a: int, b: int) -> frozenset[tuple[int, int]]:
    seen = {(a, b)}
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        for g in sys.generators:
            nxt = (g[x], g[y])
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return frozenset(seen)


def almost_embedding_check(fp: FiberProduct) -> tuple[bool, Certificate]:
    """True iff every product orbit inside the fiber product lies on the diagonal.

    Extreme invariant measures on a finite system are orbit-uniform, so this
    is the statement that every invariant measure on X x_f X sits on Δ_X.
    """
    done: set = set()
    for a, b in sorted(fp.pairs):
        if a == b or (a, b) in done:
            continue
        orb = product_orbit(fp.base, a, b)
        done |= orb
        if orb <= fp.pairs:
            w = {"orbit": sorted(orb), "variant": fp.variant}
            return False, Certificate("fail", "almost_embedding", None, w, False, stage="fiber_product")
    w = {"pairs": len(fp.pairs), "points": fp.base.n, "variant": fp.variant}
    return True, Certificate("pass", "almost_embedding", None, w, True)


def distal_check(sys: FinitePermSystem) -> bool:
    """No off-diagonal product orbit reaches the diagonal (checked, not assumed)."""
    done: set = set()
    for a in range(sys.n):
        for b in range(sys.n):
            if a == b or (a, b) in done:
                continue
            orb = product_orbit(sys, a, b)
            if any(x == y for x, y in orb):
                return False
            done |= orb
    return True


# ------------------------------------------------------------ subshifts


@dataclass(frozen=True)
class SftSystem:
    alphabet: int
    forbidden: tuple[tuple[int, ...], ...]
    window: int

    def __post_init__(self):
        object.__setattr__(self, "forbidden", tuple(tuple(w) for w in self.forbidden))
        if self.window < 1 or self.alphabet < 1:
            raise ValidationError("window and alphabet must be positive")
        if any(len(w) > self.window for w in self.forbidden):
            raise ValidationError("forbidden words longer than the window")
        if not self.blocks() or not _has_cycle(self):
            raise ValidationError("the subshift is empty")

    def allowed(self, w: Sequence[int]) -> bool:
        for f in self.forbidden:
            L = len(f)
            for i in range(len(w) - L + 1):
                if tuple(w[i:i + L]) == f:
                    return False
        return True

    def blocks(self) -> list[tuple[int, ...]]:
        return [w for w in itertools.product(range(self.alphabet), repeat=self.window) if self.allowed(w)]


def _has_cycle(s: SftSystem) -> bool:
    """A bi-infinite point exists iff the block graph has a cycle."""
    blocks = s.blocks()
    succ = {w: [v for v in blocks if v[:-1] == w[1:]] for w in blocks}
    alive = set(blocks)
    changed = True
    while changed:
        changed = False
        for w in list(alive):
            if not any(v in alive for v in succ[w]) or not any(w in succ[u] for u in alive):
                alive.discard(w)
                changed = True
    return bool(alive)


def sft_lp(s: SftSystem, objective: dict) -> Fraction:
    """max over window-k block frequencies of sum objective[w] p_w."""
    blocks = s.blocks()
    col = {w: i for i, w in enumerate(blocks)}
    A, b = [[Fraction(1)] * len(blocks)], [Fraction(1)]
    for u in itertools.product(range(s.alphabet), repeat=s.window - 1):
        row = [Fraction(0)] * len(blocks)
        for a in range(s.alphabet):
            if (a,) + u in col:
                row[col[(a,) + u]] += 1
            if u + (a,) in col:
                row[col[u + (a,)]] -= 1
        if any(row):
            A.append(row)
            b.append(Fraction(0))
    c = [q(objective.get(w, 0)) for w in blocks]
    res = maximise(c, A, b)
    if res.status != "optimal":
        raise ValidationError(f"block LP {res.status}")
    return res.value


def sft_capacity(s: SftSystem, words) -> Fraction:
    """Capacity of the cylinder set of points whose window starts with one of `words`."""
    words = [tuple(w) for w in words]
    obj = {w: 1 for w in s.blocks() if any(w[: len(p)] == p for p in words)}
    return sft_lp(s, obj)


def golden_mean() -> SftSystem:
    return SftSystem(2, ((1, 1),), 2)

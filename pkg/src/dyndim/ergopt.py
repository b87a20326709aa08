"""Maximal ergodic averages: the measure side (orbit maxima, block LPs) and
the Følner side (normalised maximal Birkhoff sums), plus ord(V, T)."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import UnsupportedError
from .ground import Cover, ord_at
from .dynsys import (AMENABLE, FinitePermSystem, SftSystem, compose, group_elements, orbits, period,
                     power, sft_lp)
from .rational import lcm_all, q

DEFAULT_F_CAP = 12
SUBSET_WINDOW = 8


def _values(f, n: int) -> list[Fraction]:
    if callable(f):
        return [q(f(x)) for x in range(n)]
    vals = [q(v) for v in f]
    if len(vals) != n:
        raise UnsupportedError("observable length differs from the point count")
    return vals


def max_ergodic_average(sys, f) -> Fraction:
    """sup over invariant probability measures of the integral of f.

    Permutation systems: the largest orbit average (extreme invariant
    measures are orbit-uniform). Subshifts: exact LP over window-k block
    frequencies, with f given as a map from k-blocks to values.
    Works for any sign of f.
    """
    if isinstance(sys, SftSystem):
        return sft_lp(sys, {tuple(k): q(v) for k, v in dict(f).items()})
    vals = _values(f, sys.n)
    return max(Fraction(sum(vals[x] for x in orb), len(orb)) for orb in orbits(sys))


def best_orbit(sys: FinitePermSystem, f) -> tuple[int, ...]:
    vals = _values(f, sys.n)
    return max(orbits(sys), key=lambda o: (Fraction(sum(vals[x] for x in o), len(o)), [-x for x in o]))


class _Birkhoff:
    """Exact Birkhoff sums S_n f(x) = sum_{i<n} f(T^i x) via per-cycle prefix sums."""

    def __init__(self, sys: FinitePermSystem, vals: Sequence[Fraction]):
        self.where: list[tuple[int, int]] = [(0, 0)] * sys.n
        self.prefix: list[list[Fraction]] = []
        T = sys.T
        for c, orb in enumerate(orbits(sys)):
            seq = [orb[0]]
            while T[seq[-1]] != orb[0]:
                seq.append(T[seq[-1]])
            pre = [0]
            for y in seq + seq:
                pre.append(pre[-1] + vals[y])
            self.prefix.append(pre)
            for i, y in enumerate(seq):
                self.where[y] = (c, i)

    def __call__(self, x: int, n: int) -> Fraction:
        c, i = self.where[x]
        pre = self.prefix[c]
        p = (len(pre) - 1) // 2
        full, rest = divmod(n, p)
        return full * pre[p] + pre[i + rest] - pre[i]

    def max_avg(self, n: int, npts: int, scale: int = 1) -> Fraction:
        return Fraction(max(self(x, n) for x in range(npts)), n * scale)


@dataclass(frozen=True)
class ErgAvgReport:
    measure_value: Fraction
    estimates: tuple[tuple[int, Fraction], ...]
    at_period: Fraction
    period: int
    folner_inf: Fraction
    inf_candidates: int
    inf_cap: int
    inf_capped: bool
    extras: dict = field(default_factory=dict)

    @property
    def agree(self) -> bool:
        return self.measure_value == self.at_period == self.folner_inf

    @property
    def lower_ok(self) -> bool:
        return self.measure_value <= self.folner_inf and all(v >= self.measure_value for _, v in self.estimates)

    def to_dict(self) -> dict:
        return {"measure_value": self.measure_value, "estimates": [list(e) for e in self.estimates],
                "folner_at_period": self.at_period, "period": self.period, "folner_inf": self.folner_inf,
                "inf_candidates": self.inf_candidates, "inf_cap": self.inf_cap,
                "inf_is_upper_bound_only": self.inf_capped, "agree": self.agree, "measure_le_inf": self.lower_ok}


def _subset_inf(rows: list[list[int]], cap: int, scale: int = 1):
    """min over F ∋ 0 of (1/|F|) max_x sum_{g in F} rows[g][x] / scale, |F| <= cap."""
    m = len(rows)
    npts = len(rows[0])
    best, count = None, 0
    others = list(range(1, m))
    for size in range(0, min(cap, m) - 1 + 1):
        for rest in itertools.combinations(others, size):
            F = (0,) + rest
            sums = [sum(rows[g][x] for g in F) for x in range(npts)]
            v = Fraction(max(sums), len(F) * scale)
            count += 1
            if best is None or v < best:
                best = v
    return best, count


def folner_formulas(sys: FinitePermSystem, f, n_max: int | None = None,
                    f_size_cap: int = DEFAULT_F_CAP, subset_window: int = SUBSET_WINDOW) -> ErgAvgReport:
    """Compare the measure value with the Følner-side formulas.

    Z-actions: F_n = {0..n-1} for n <= n_max, plus n = period. The infimum
    runs over intervals of length <= cap and over every F ∋ 0 inside
    {0..w-1} (w = min(period, subset_window)) with |F| <= cap; by translation
    invariance of the formula F may be assumed to contain 0.
    Finite groups: F_n = Γ, infimum over every F ∋ e with |F| <= cap.
    """
    if sys.group not in AMENABLE:
        raise UnsupportedError(f"group tag {sys.group!r} is not amenable")
    vals = _values(f, sys.n)
    mv = max_ergodic_average(sys, vals)
    # the Følner side runs on integers: every value times a common denominator
    D = lcm_all(v.denominator for v in vals)
    ivals = [int(v * D) for v in vals]
    if sys.group == "Z":
        L = period(sys)
        bk = _Birkhoff(sys, ivals)
        top = n_max if n_max is not None else min(L, 64)
        estimates = tuple((n, bk.max_avg(n, sys.n, D)) for n in range(1, top + 1))
        at_L = bk.max_avg(L, sys.n, D)
        w = min(L, subset_window)
        T = sys.T
        rows = [[ivals[y] for y in power(T, g)] for g in range(w)]
        best, count = _subset_inf(rows, f_size_cap, D)
        lengths = set(range(1, min(f_size_cap, top) + 1))
        if L <= f_size_cap:
            lengths.add(L)
        for n in sorted(lengths):
            count += 1
            best = min(best, bk.max_avg(n, sys.n, D))
        capped = f_size_cap < L
        return ErgAvgReport(mv, estimates, at_L, L, best, count, f_size_cap, capped)
    if sys.group == "finite":
        els = group_elements(sys)
        rows = [[ivals[p[x]] for x in range(sys.n)] for p in els]
        at_G = Fraction(max(sum(r[x] for r in rows) for x in range(sys.n)), len(els) * D)
        best, count = _subset_inf(rows, f_size_cap, D)
        capped = f_size_cap < len(els)
        return ErgAvgReport(mv, ((len(els), at_G),), at_G, len(els), best, count, f_size_cap, capped)
    # Z^k: boxes {0..n-1}^k
    k = len(sys.generators)
    top = n_max or 6
    estimates = []
    for n in range(1, top + 1):
        acc = [Fraction(0)] * sys.n
        for v in itertools.product(range(n), repeat=k):
            p = tuple(range(sys.n))
            for g, e in zip(sys.generators, v):
                p = compose(power(g, e), p)
            for x in range(sys.n):
                acc[x] += vals[p[x]]
        estimates.append((n ** k, max(acc) / n ** k))
    els = group_elements(sys)
    at_G = max(sum(vals[p[x]] for p in els) for x in range(sys.n)) / len(els)
    best = min(v for _, v in estimates)
    return ErgAvgReport(mv, tuple(estimates), at_G, len(els), min(best, at_G), len(estimates) + 1, f_size_cap, True)


def ord_T(sys, v) -> Fraction:
    """sup over invariant measures of the integral of x -> ord(v, x)."""
    if isinstance(sys, SftSystem):
        sets = [{tuple(w) for w in s} for s in v]
        obj = {w: -1 + sum(1 for s in sets if w in s) for w in sys.blocks()}
        return sft_lp(sys, obj)
    return max_ergodic_average(sys, [ord_at(v, x) for x in range(sys.n)])


def ord_profile(sys: FinitePermSystem, v: Cover) -> list[int]:
    return [ord_at(v, x) for x in range(sys.n)]

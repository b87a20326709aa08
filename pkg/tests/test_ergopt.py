import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dyndim.dynsys import (FinitePermSystem, InvariantMeasure, SftSystem, finite_group_system, golden_mean,
                           orbit_measure, orbits, period, z_system)
from dyndim.ergopt import best_orbit, folner_formulas, max_ergodic_average, ord_T
from dyndim.errors import UnsupportedError
from dyndim.fixtures import (antipodal, polygon_rotation, random_finite_group_system, random_subset,
                             random_z_system, singleton_cover, trivial_z)
from dyndim.ground import bit_cover, discrete_space, ord_at, ord_sup
from oracles import sft_max_by_cycles

seeds = st.integers(0, 100_000)


def test_three_cycle_indicator():
    s = z_system([1, 2, 0])
    assert max_ergodic_average(s, [1, 0, 0]) == F(1, 3)
    rep = folner_formulas(s, [1, 0, 0])
    assert rep.at_period == rep.folner_inf == F(1, 3) and rep.agree


def test_fixed_points_take_the_max():
    s = z_system([0, 1])
    assert max_ergodic_average(s, [0, 1]) == 1
    assert best_orbit(s, [0, 1]) == (1,)


def test_negative_observables():
    s = z_system([1, 0, 2])
    assert max_ergodic_average(s, [F(-1), F(1), F(-1, 2)]) == 0
    assert max_ergodic_average(s, [F(-3), F(-1), F(-2)]) == -2


def test_golden_mean():
    g = golden_mean()
    f = {w: F(w[0]) for w in g.blocks()}
    assert max_ergodic_average(g, f) == F(1, 2)
    assert sft_max_by_cycles(g, f) == F(1, 2)


def test_folner_trivial_action():
    s = z_system([0, 1, 2])
    rep = folner_formulas(s, [F(1, 3), F(2, 3), F(0)])
    assert rep.measure_value == rep.at_period == rep.folner_inf == F(2, 3)
    assert all(v == F(2, 3) for _, v in rep.estimates)


def test_folner_finite_group():
    s = finite_group_system([(1, 2, 0, 4, 3)])
    rep = folner_formulas(s, [F(1), F(0), F(0), F(1, 2), F(1, 2)])
    assert rep.measure_value == rep.at_period == F(1, 2)
    assert rep.agree and not rep.inf_capped


def test_folner_capped_infimum_is_an_upper_bound():
    s = z_system(list(range(1, 15)) + [0])
    f = [F(1)] + [F(0)] * 14
    rep = folner_formulas(s, f, f_size_cap=4)
    assert rep.inf_capped
    assert rep.folner_inf >= rep.measure_value == F(1, 15)
    assert rep.at_period == F(1, 15)


def test_non_amenable_tag_rejected():
    s = FinitePermSystem(discrete_space(2), ((1, 0), (0, 1)), "free")
    with pytest.raises(UnsupportedError):
        folner_formulas(s, [0, 1])


def test_ord_T_examples():
    triv = trivial_z(12)
    part = bit_cover(triv.space, [{x} for x in range(triv.n)])
    assert ord_T(triv, part) == 0
    s = antipodal(12)
    cx = s.space.complex
    # two arcs cut at vertices 0 and 5: each cut point is alone in its orbit
    u = bit_cover(s.space, [cx.closed_arc(0, 5), cx.closed_arc(5, 7)])
    assert sorted(x for x in range(s.n) if ord_at(u, x) == 1) == [0, 5]
    assert ord_T(s, u) == F(1, 2)
    # cutting at antipodal vertices puts both in one orbit
    u2 = bit_cover(s.space, [cx.closed_arc(0, 6), cx.closed_arc(6, 6)])
    assert ord_T(s, u2) == 1


def test_ord_T_on_sft_blocks():
    g = golden_mean()
    cover = [{(0, 0), (0, 1)}, {(0, 1), (1, 0)}]
    # ord is 1 exactly on the block 01, whose frequency is at most 1/2
    assert ord_T(g, cover) == F(1, 2)


def test_rotation_of_order_three():
    s = polygon_rotation(3, 12)
    assert ord_T(s, singleton_cover(s.space)) == 0


# ------------------------------------------------------------ properties


def _any_system(seed):
    rng = random.Random(seed)
    return random_z_system(rng, 25) if seed % 2 else random_finite_group_system(rng, 25)


@given(seeds)
def test_explicit_measures_never_exceed_the_sup(seed):
    s = _any_system(seed)
    rng = random.Random(seed)
    f = [F(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(s.n)]
    top = max_ergodic_average(s, f)
    for o in orbits(s):
        assert InvariantMeasure(orbit_measure(o, s.n)).integrate(f) <= top
    assert any(InvariantMeasure(orbit_measure(o, s.n)).integrate(f) == top for o in orbits(s))


@given(seeds)
def test_folner_agrees_when_the_cap_covers_the_period(seed):
    rng = random.Random(seed)
    s = random_z_system(rng, 12)
    f = [F(rng.randint(0, 6), 6) for _ in range(s.n)]
    L = period(s)
    rep = folner_formulas(s, f, f_size_cap=max(L, 1))
    assert rep.measure_value == rep.at_period == rep.folner_inf
    assert rep.lower_ok


@given(seeds)
def test_folner_estimates_bound_the_measure_value(seed):
    s = _any_system(seed)
    rng = random.Random(seed)
    f = [F(rng.randint(0, 4), 4) for _ in range(s.n)]
    rep = folner_formulas(s, f)
    assert rep.lower_ok and rep.at_period == rep.measure_value


@given(seeds)
def test_ord_T_at_most_ord_sup(seed):
    s = _any_system(seed)
    rng = random.Random(seed)
    u = bit_cover(s.space, [random_subset(rng, s.n) | {x} for x in range(min(s.n, 4))]
                  + [set(range(s.n))])
    assert ord_T(s, u) <= ord_sup(u)


@given(seeds)
def test_trivial_action_ord_T_is_ord_sup(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 20)
    s = z_system(range(n))
    u = bit_cover(s.space, [random_subset(rng, n) for _ in range(3)] + [set(range(n))])
    assert ord_T(s, u) == ord_sup(u)


@given(st.integers(2, 3), st.lists(st.lists(st.integers(0, 2), min_size=2, max_size=2), max_size=3), seeds)
def test_sft_observable_matches_cycle_oracle(alphabet, forb, seed):
    forb = [tuple(v % alphabet for v in w) for w in forb]
    try:
        s = SftSystem(alphabet, tuple(forb), 2)
    except Exception:
        return
    rng = random.Random(seed)
    f = {w: F(rng.randint(-4, 4), rng.randint(1, 3)) for w in s.blocks()}
    assert max_ergodic_average(s, f) == sft_max_by_cycles(s, f)

import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyndim.dimension import (Cylinder, RefinementError, UrpTowers, boundary, cubical_shift_upper,
                              dim_U_T_lower_dim1, dim_U_T_upper, endpoint_avoiding_refinement, lemma92_check,
                              mdim_dim_compare, replay_upper, sbp_witness_search, thm71_check, urp_check)
from dyndim.dynsys import FinitePermSystem, capacity, orbits, z_system
from dyndim.errors import UnsupportedError
from dyndim.ergopt import ord_T
from dyndim.fixtures import (antipodal, arc_cover, polygon_rotation, random_finite_group_system, random_subset,
                             random_z_system, singleton_cover, trivial_z)
from dyndim.ground import BitSet, bit_cover, cycle_space, discrete_space, mesh, ord_at, path_space, refines

seeds = st.integers(0, 100_000)


# ------------------------------------------------------------ upper / lower bounds


def test_upper_bound_from_a_refinement_and_replay():
    s = antipodal(12)
    u = arc_cover(s.space)
    v = endpoint_avoiding_refinement(s, u)
    cert = dim_U_T_upper(s, u, v)
    assert cert.kind == "upper_bound" and cert.value == F(1, 2)
    assert replay_upper(s, u, cert) == cert.value
    assert refines(v, u)


def test_non_refinement_is_rejected():
    s = antipodal(12)
    u = arc_cover(s.space)
    v = bit_cover(s.space, [set(range(s.n))])
    with pytest.raises(RefinementError) as e:
        dim_U_T_upper(s, u, v)
    assert e.value.index == 0


def test_lower_bound_by_connectedness():
    s = antipodal(12)
    cert = dim_U_T_lower_dim1(s, arc_cover(s.space))
    assert cert.kind == "lower_bound" and cert.value == F(1, 2)


def test_lower_bound_unsupported_cases():
    path = FinitePermSystem(path_space(4), (tuple(range(path_space(4).n)),), "Z")
    with pytest.raises(UnsupportedError):
        thm71_check(path)
    with pytest.raises(UnsupportedError):
        thm71_check(trivial_z(12))  # not free
    whole = bit_cover(antipodal(12).space, [set(range(antipodal(12).n))])
    with pytest.raises(UnsupportedError):
        dim_U_T_lower_dim1(antipodal(12), whole)
    with pytest.raises(UnsupportedError):
        dim_U_T_lower_dim1(z_system([1, 0]), bit_cover(discrete_space(2), [{0}, {1}]))


def test_reflection_is_not_cellular_free():
    sp = cycle_space(4)
    # reflection fixing vertex 0 and 2
    refl = tuple([0, 3, 2, 1] + [4 + 3, 4 + 2, 4 + 1, 4 + 0])
    with pytest.raises(UnsupportedError):
        thm71_check(FinitePermSystem(sp, (refl,), "finite"))


@pytest.mark.parametrize("order,cells,value", [(2, 12, F(1, 2)), (2, 24, F(1, 2)), (3, 12, F(1, 3)),
                                               (6, 24, F(1, 6))])
def test_free_rotation_equality(order, cells, value):
    cert = thm71_check(polygon_rotation(order, cells))
    assert cert.kind == "equality" and cert.passed
    assert cert.lower == cert.upper == cert.value == value


def test_order_four_needs_a_non_resonant_cover():
    s = polygon_rotation(4, 12)
    # four arcs aligned with the rotation leave no cut set in distinct orbits
    with pytest.raises(UnsupportedError):
        thm71_check(s)
    cert = thm71_check(s, arc_cover(s.space, arcs=3))
    assert cert.kind == "equality" and cert.value == F(1, 4)


# ------------------------------------------------------------ disjoint translates


def _cut_setup():
    s = antipodal(12)
    cx = s.space.complex
    u = bit_cover(s.space, [cx.closed_arc(0, 5), cx.closed_arc(5, 7)])
    return s, u


def test_lemma92_accepts_valid_family():
    s, u = _cut_setup()
    cert = lemma92_check(s, u, {(0, 0): {0, 5}}, 1)
    assert cert.passed and cert.value == 1 and cert.witness["direct_ord_T"] == F(1, 2)


def test_lemma92_empty_family_for_a_partition():
    s = z_system([1, 2, 0])
    u = bit_cover(s.space, [{0}, {1}, {2}])
    assert lemma92_check(s, u, {}, 0).passed


def test_lemma92_rejections():
    s, u = _cut_setup()
    assert lemma92_check(s, u, {(0, 0): {0}}, 1).stage == "pointwise"
    # T moves 0 to 6, so the two translates collide
    tampered = {(0, 0): {0, 5}, (0, 1): {6}}
    assert lemma92_check(s, u, tampered, 1).stage == "disjoint_translates"
    assert lemma92_check(s, u, {(1, 0): {0, 5}}, 1).stage == "indices"


def test_cylinder_translate():
    c = Cylinder((1, 2), None)
    assert c.translate(3, 4).axis == (1, 1)


# ------------------------------------------------------------ cubical shift


@pytest.mark.parametrize("d,n", [(1, 2), (1, 3)])
def test_cubical_shift_equality(d, n):
    cert = cubical_shift_upper(d, n, F(1, 2))
    assert cert.passed and cert.kind == "equality" and cert.value == d
    for check in ("disjoint_translates", "covering", "pointwise_bound", "mesh_below_eps", "direct_le_d"):
        assert cert.witness["checks"][check] is True


def test_cubical_shift_two_dims():
    cert = cubical_shift_upper(2, 2, F(1, 2))
    assert cert.passed and cert.upper == 2
    assert cert.witness["direct_ord_T"] == 2


# ------------------------------------------------------------ boundary search


def test_boundary_of_arcs():
    sp = cycle_space(6)
    cx = sp.complex
    assert boundary(sp, BitSet(cx.closed_arc(1, 2))) == {1, 3}
    assert boundary(discrete_space(3), BitSet(frozenset({0}))) == frozenset()


def test_sbp_discrete_passes():
    s = random_z_system(random.Random(3), 20)
    cert = sbp_witness_search(s, F(1, 8))
    assert cert.passed and cert.value == 0


def test_sbp_trivial_two_points():
    s = z_system([0, 1])
    assert sbp_witness_search(s, F(1, 2)).passed


@pytest.mark.parametrize("eps", [F(1, 2), F(1, 4), F(1, 8)])
def test_sbp_antipodal_is_inconclusive(eps):
    cert = sbp_witness_search(antipodal(24), eps)
    assert cert.kind == "inconclusive" and not cert.passed
    assert cert.witness["exhaustive"]


# ------------------------------------------------------------ towers


def test_urp_single_base_on_a_cycle():
    n = 6
    s = z_system([(i + 1) % n for i in range(n)])
    t = UrpTowers((BitSet(frozenset({0})),), (tuple(range(n)),), F(1, 10))
    cert = urp_check(s, t)
    assert cert.passed and cert.value == 0


def test_urp_overlap_and_leftover():
    n = 6
    s = z_system([(i + 1) % n for i in range(n)])
    t = UrpTowers((BitSet(frozenset({0})),), ((0, 1, 6),), F(1, 10))
    assert urp_check(s, t).stage == "disjointness"
    short = UrpTowers((BitSet(frozenset({0})),), ((0, 1, 2, 3, 4),), F(1, 10))
    cert = urp_check(s, short)
    assert cert.stage == "leftover" and cert.value == F(1, 6)
    assert urp_check(s, UrpTowers(short.bases, short.shapes, F(1, 5))).passed


def test_urp_closed_variant_on_discrete_space():
    n = 4
    s = z_system([1, 2, 3, 0])
    t = UrpTowers((BitSet(frozenset({0})),), ((0, 1, 2, 3),), F(1, 2))
    assert urp_check(s, t, closed=True).passed


# ------------------------------------------------------------ mean dimension


def test_mdim_trivial_action_sits_below_dim():
    cert = mdim_dim_compare(trivial_z(12), n=24)
    assert cert.value == F(1, 24) and cert.upper == 1 and cert.verified


@pytest.mark.parametrize("sys,val", [(antipodal(12), F(1, 2)), (polygon_rotation(3), F(1, 3))])
def test_mdim_free_rotations_agree(sys, val):
    cert = mdim_dim_compare(sys)
    assert cert.kind == "equality" and cert.value == val


def test_mdim_discrete_space():
    cert = mdim_dim_compare(z_system([1, 0, 2]))
    assert cert.kind == "equality" and cert.value == 0


# ------------------------------------------------------------ properties


def _any_system(seed):
    rng = random.Random(seed)
    return random_z_system(rng, 20) if seed % 2 else random_finite_group_system(rng, 20)


@given(seeds)
def test_upper_certificates_are_sound(seed):
    s = _any_system(seed)
    rng = random.Random(seed)
    u = bit_cover(s.space, [random_subset(rng, s.n) | {x} for x in range(s.n)])
    # the joint refinement of u with singletons is u-refining; its ord_T bounds the best one
    v = bit_cover(s.space, [{x} for x in range(s.n)])
    cert = dim_U_T_upper(s, u, v)
    assert cert.value == ord_T(s, v) == 0
    assert dim_U_T_upper(s, u, u).value == ord_T(s, u) >= cert.value


@given(seeds)
def test_finer_refinements_need_not_raise_the_bound(seed):
    s = _any_system(seed)
    rng = random.Random(seed)
    sets = [random_subset(rng, s.n) | {x} for x in range(s.n)]
    u = bit_cover(s.space, sets)
    sub = bit_cover(s.space, [frozenset(x for x in t if rng.random() < 0.7) | {x} for x, t in enumerate(sets)])
    # a set-wise shrink of u covers, refines u, and has pointwise order <= u
    assert refines(sub, u)
    assert ord_T(s, sub) <= ord_T(s, u)


@given(seeds)
def test_monotone_under_invariant_subsystems(seed):
    s = random_z_system(random.Random(seed), 20)
    orb = orbits(s)
    keep = sorted(x for o in orb[: max(1, len(orb) // 2)] for x in o)
    idx = {x: i for i, x in enumerate(keep)}
    sub = z_system([idx[s.T[x]] for x in keep])
    f = [ord_at(bit_cover(s.space, [{x} for x in range(s.n)] + [set(range(s.n))]), x) for x in range(s.n)]
    big = ord_T(s, bit_cover(s.space, [{x} for x in range(s.n)] + [set(range(s.n))]))
    small = ord_T(sub, bit_cover(sub.space, [{x} for x in range(sub.n)] + [set(range(sub.n))]))
    assert small <= big and f


@settings(max_examples=25)
@given(seeds, st.sampled_from([F(1, 2), F(1, 4), F(1, 8)]))
def test_boundary_witness_bounds_ord(seed, eps):
    s = _any_system(seed)
    cert = sbp_witness_search(s, eps)
    assert cert.passed
    v = bit_cover(s.space, cert.witness["cover"])
    assert mesh(v) < eps and capacity(s, set()) == 0
    assert ord_T(s, v) <= cert.value

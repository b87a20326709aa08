from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dyndim import boxgeom
from dyndim.errors import CoverError, DomainMismatch, ValidationError
from dyndim.fixtures import arc_cover
from dyndim.ground import (BOTTOM, BitSet, Cover, Interval, bit_cover, box_cover, box_set, closed, cycle_space,
                           dim_of_cover_bruteforce, discrete_space, grid_space, is_covering, joint_refinement,
                           line_space, mesh, open_iv, ord_at, ord_sup, refines, shrink_to_closed, subset,
                           unit_box, uncovered_point)


def interval_cover(*pairs, opened=False):
    mk = open_iv if opened else closed
    return box_cover([box_set(mk(a, b)) for a, b in pairs], unit_box(1))


HALVES = interval_cover((0, F(1, 2)), (F(1, 2), 1))
THIRDS = interval_cover((0, F(2, 3)), (F(1, 3), 1))


def test_ord_at_closed_halves():
    assert ord_at(HALVES, (F(1, 2),)) == 1
    assert ord_at(HALVES, (F(1, 4),)) == 0


def test_ord_at_open_excludes_endpoints():
    c = interval_cover((0, F(1, 2)), (F(1, 2), 1), opened=True)
    assert ord_at(c, (F(1, 2),)) == -1


def test_ord_at_one_dimensional_brickwall():
    bw = boxgeom.build_brickwall(1, F(1, 2))
    assert boxgeom.brickwall_ord(bw, (F(1, 4),)) == 1
    cov = boxgeom.brickwall_cover(bw)
    assert ord_at(cov, (F(1, 4),)) == 1 and ord_at(cov, (F(1, 8),)) == 0


def test_domain_mismatch():
    with pytest.raises(DomainMismatch):
        ord_at(HALVES, 0)
    with pytest.raises(DomainMismatch):
        ord_at(bit_cover(discrete_space(2), [{0}, {1}]), (F(0),))


def test_ord_sup_examples():
    assert ord_sup(bit_cover(discrete_space(4), [{0, 1}, {2, 3}])) == 0
    assert ord_sup(THIRDS) == 1


def test_ord_sup_two_dimensional_brickwall():
    bw = boxgeom.build_brickwall(2, F(1, 2))
    cov = boxgeom.brickwall_cover(bw)
    assert ord_sup(cov) == 2


def test_refines_examples():
    whole = interval_cover((0, 1))
    assert refines(HALVES, whole)
    assert not refines(whole, HALVES)
    assert refines(HALVES, HALVES)


def test_joint_refinement_of_interval_covers():
    j = joint_refinement(THIRDS, HALVES)
    assert len(j) == 4
    assert refines(j, THIRDS) and refines(j, HALVES)


def test_joint_with_whole_space_is_identity():
    sp = discrete_space(5)
    a = bit_cover(sp, [{0, 1, 2}, {2, 3, 4}])
    j = joint_refinement(a, bit_cover(sp, [range(5)]))
    assert [s.members for s in j.sets] == [s.members for s in a.sets]


def test_mesh_examples():
    sp = line_space([F(i, 4) for i in range(5)])
    assert mesh(bit_cover(sp, [{x} for x in sp.points])) == 0
    assert mesh(THIRDS) == F(2, 3)
    bw = boxgeom.build_brickwall(1, F(1, 2))
    assert mesh(boxgeom.brickwall_cover(bw)) == F(1, 4)


def test_shrink_open_intervals():
    u = box_cover([box_set(open_iv(F(-1, 4), F(5, 8))), box_set(open_iv(F(3, 8), F(5, 4)))], unit_box(1))
    c = shrink_to_closed(u)
    assert c.sets[0].boxes[0][0] == closed(0, F(1, 2))
    assert c.sets[1].boxes[0][0] == closed(F(1, 2), 1)
    assert all(s.closed for s in c.sets)


def test_shrink_discrete_is_identity():
    u = bit_cover(discrete_space(3), [{0, 1}, {2}])
    assert [s.members for s in shrink_to_closed(u).sets] == [s.members for s in u.sets]


def test_shrink_on_coarse_complex_raises():
    sp = cycle_space(4)
    u = bit_cover(sp, [sp.complex.open_arc(0, 2), sp.complex.open_arc(2, 2)])
    with pytest.raises(CoverError):
        shrink_to_closed(u)


def test_bruteforce_examples():
    sp = cycle_space(12)
    assert dim_of_cover_bruteforce(bit_cover(sp, [range(sp.n)]))[0] == 0
    u = arc_cover(sp, arcs=2)
    val, v = dim_of_cover_bruteforce(u, 12)
    assert val == 1 and refines(v, u)
    assert dim_of_cover_bruteforce(Cover(()))[0] == BOTTOM


def test_bruteforce_on_boxes():
    # [0,1] is connected, so two proper closed pieces must meet
    val, v = dim_of_cover_bruteforce(THIRDS, 3)
    assert val == 1 and refines(v, THIRDS)
    assert dim_of_cover_bruteforce(interval_cover((0, 1)), 2)[0] == 0


def test_metric_checks():
    grid_space(2, 2).check_metric()
    with pytest.raises(ValidationError):
        line_space([0, 0]).check_metric()
    with pytest.raises(ValidationError):
        Interval(F(1), F(0))


def test_uncovered_point_found():
    c = interval_cover((0, F(1, 3)), (F(1, 2), 1))
    assert not is_covering(c)
    x = uncovered_point(c)
    assert F(1, 3) < x[0] < F(1, 2)


# ------------------------------------------------------------ properties


@st.composite
def cover_triples(draw):
    n = draw(st.integers(1, 7))
    sp = discrete_space(n)

    def cov():
        k = draw(st.integers(1, 4))
        sets = [set(draw(st.sets(st.integers(0, n - 1), max_size=n))) for _ in range(k)]
        for x in range(n):
            sets[draw(st.integers(0, k - 1))].add(x)
        return bit_cover(sp, sets)

    return cov(), cov(), cov()


@given(cover_triples())
def test_refines_is_a_preorder(t):
    a, b, c = t
    assert refines(a, a)
    if refines(a, b) and refines(b, c):
        assert refines(a, c)


@given(cover_triples())
def test_joint_refinement_properties(t):
    a, b, _ = t
    j = joint_refinement(a, b)
    assert refines(j, a) and refines(j, b)
    assert is_covering(j)
    assert all(ord_at(j, x) >= 0 for x in a.space.points)


@given(st.lists(st.integers(1, 6), min_size=2, max_size=5), st.lists(st.integers(1, 8), min_size=5, max_size=5))
def test_shrink_boxes_keeps_cover_and_inclusion(widths, pads):
    total = sum(widths)
    cuts = [F(sum(widths[:i]), total) for i in range(len(widths) + 1)]
    sets = [box_set(open_iv(cuts[i] - F(1, 8 * pads[i % 5]), cuts[i + 1] + F(1, 8 * pads[(i + 1) % 5])))
            for i in range(len(widths))]
    u = box_cover(sets, unit_box(1))
    c = shrink_to_closed(u)
    assert is_covering(c)
    for s, t in zip(c.sets, u.sets):
        assert s.closed and subset(s, t, unit_box(1))


@st.composite
def nested_cycle_covers(draw):
    cells = draw(st.integers(3, 7))
    sp = cycle_space(cells)
    cx = sp.complex
    cuts = sorted(draw(st.sets(st.integers(0, cells - 1), min_size=2, max_size=cells)))
    fine = []
    for a, b in zip(cuts, cuts[1:] + [cuts[0] + cells]):
        fine.append(set(cx.closed_arc(a, b - a)))
    coarse = []
    for s in fine:
        extra = draw(st.sets(st.integers(0, sp.n - 1), max_size=3))
        coarse.append(s | extra)
    if draw(st.booleans()) and len(coarse) > 2:
        coarse = [coarse[0] | coarse[1]] + coarse[2:]
    return bit_cover(sp, fine), bit_cover(sp, coarse)


@given(nested_cycle_covers())
def test_bruteforce_antitone(pair):
    fine, coarse = pair
    assert refines(fine, coarse)
    assert dim_of_cover_bruteforce(coarse)[0] <= dim_of_cover_bruteforce(fine)[0]


@given(nested_cycle_covers())
def test_bruteforce_witness_refines(pair):
    fine, _ = pair
    val, v = dim_of_cover_bruteforce(fine)
    assert refines(v, fine) and ord_sup(v) == val

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctphan.coeffsys import (
    CoordinateError,
    VertexAut,
    brute_force_A,
    edge_space,
    fit_vertex_aut,
    functional_restriction,
    hexagon_solutions,
    hexagon_solve,
    torus_restriction_index,
    vspace,
)

SPACES = [("ct", 2), ("ct", 3), ("ct", 4), ("ct", 8), ("ct", 9), ("phan", 2), ("phan", 3), ("phan", 4)]


@st.composite
def auts(draw, n=3):
    sp = vspace(*draw(st.sampled_from(SPACES)))
    pick = st.sampled_from(sp.all())
    return sp, [draw(pick) for _ in range(n)]


@settings(max_examples=200, deadline=None)
@given(auts())
def test_group_law(x):
    sp, (a, b, c) = x
    assert (a @ b) @ c == a @ (b @ c)
    assert a @ a.inverse() == sp.identity() == a.inverse() @ a
    assert a.c_part @ a.torus_part == a


@settings(max_examples=100, deadline=None)
@given(auts(2))
def test_composition_matches_action(x):
    sp, (a, b) = x
    G = sp.group.elements
    assert np.array_equal((a @ b).apply(G), a.apply(b.apply(G)))


@pytest.mark.parametrize("kind,q", SPACES[:3] + SPACES[5:])
def test_coordinates_act_faithfully(kind, q):
    sp = vspace(kind, q)
    for a in sp.all():
        assert fit_vertex_aut(sp, a.apply(sp.group.generators)) == a


@pytest.mark.parametrize("kind,q,size", [("ct", 2, 2), ("ct", 3, 4), ("ct", 4, 12),
                                         ("phan", 2, 6), ("phan", 3, 8), ("phan", 4, 20)])
def test_brute_force_a_sizes(kind, q, size):
    normalizing, coords, _ = brute_force_A(vspace(kind, q))
    assert len(normalizing) == len(coords) == size
    assert vspace(kind, q).order() == size


def test_coordinate_range_checked():
    sp = vspace("ct", 4)
    with pytest.raises(CoordinateError):
        VertexAut(sp, 0, 0, 0)
    with pytest.raises(CoordinateError):
        VertexAut(sp, 1, 2, 0)
    assert VertexAut.from_json(sp, sp.c(1, 1).to_json()) == sp.c(1, 1)


EDGES = [("ct", "A2", 2, 2), ("ct", "A2", 4, 4), ("ct", "C2", 2, 2), ("ct", "C2", 3, 3),
         ("ct", "TA3", 4, 2), ("phan", "A2", 2, 2), ("phan", "C2", 3, 3)]


@pytest.mark.parametrize("kind,ptype,vh,vt", EDGES)
def test_closed_form_restriction(kind, ptype, vh, vt):
    es = edge_space(kind, ptype, vh, vt)
    for e in es.all():
        assert functional_restriction(e, 0) == e.restrict()[0]
        assert functional_restriction(e, 1) == e.restrict()[1]


@pytest.mark.parametrize("kind,ptype,vh,vt", EDGES)
def test_image_membership_matches_restrictions(kind, ptype, vh, vt):
    es = edge_space(kind, ptype, vh, vt)
    image = {e.restrict() for e in es.all()}
    s1, s2 = es.sides
    assert image == {(a, b) for a in s1.all() for b in s2.all() if es.in_image(a, b)}
    for a, b in image:
        assert es.lift(a, b).restrict() == (a, b)


@pytest.mark.parametrize("kind,ptype,vh,vt", EDGES)
def test_edge_auts_preserve_sides(kind, ptype, vh, vt):
    es = edge_space(kind, ptype, vh, vt)
    P = es.pair
    for e in es.all()[:12]:
        for side in (0, 1):
            assert P.images[side].contains(e.apply(P.images[side].elements))


def test_c2_torus_index():
    assert torus_restriction_index(edge_space("ct", "C2", 2, 2)) == 1
    assert torus_restriction_index(edge_space("ct", "C2", 3, 3)) == 2
    assert torus_restriction_index(edge_space("ct", "A2", 3, 3)) == 1


def _census(es, side_i):
    ci, cj = es.sides[side_i].all_c(), es.sides[1 - side_i].all_c()
    return {len(hexagon_solutions(es, side_i, g, gp, ph, gj, gplus_j=x))
            for g, gp, ph, gj, x in itertools.product(ci, ci, ci, cj, cj)}


@pytest.mark.parametrize("kind,ptype,vh,vt", EDGES[:4] + EDGES[5:])
def test_hexagon_unique(kind, ptype, vh, vt):
    es = edge_space(kind, ptype, vh, vt)
    assert _census(es, 0) == _census(es, 1) == {1}


def test_ta3_hexagon_from_tail_has_two_solutions():
    es = edge_space("ct", "TA3", 4, 2)
    assert _census(es, 0) == {1}
    assert _census(es, 1) == {2}


def test_hexagon_solution_commutes():
    es = edge_space("ct", "A2", 4, 4)
    s1, s2 = es.sides
    g1, p1, g2 = s1.c(1, 1), s1.c(1, 0), s2.c(0, 1)
    rest, e = hexagon_solve(es, 0, g1, s1.identity(), p1, g2, gplus_j=s2.identity())
    assert e.restrict() == (p1 @ g1.inverse(), rest @ g2.inverse())
    with pytest.raises(ValueError):
        hexagon_solve(es, 0, g1, g1, g1, g2)

import numpy as np
import pytest

from ctphan.matgrp import classical_order, keys, matmul
from ctphan.standard_pairs import (
    build_ct_pair,
    build_pair,
    fundamental_root_groups,
    images_commute,
    phan_tori,
    vertex_group,
)

SMALL = [("ct", "A2", 2), ("ct", "A2", 3), ("ct", "C2", 2), ("ct", "TA3", 2),
         ("phan", "A2", 2), ("phan", "C2", 2)]


def _is_hom(F, V, m, img):
    idx = V.locate(V.generators)
    prods = matmul(V.field, V.elements[:, None], V.generators[None]).reshape(-1, 2, 2)
    lhs = m.apply(prods)
    rhs = matmul(F, img[:, None], img[idx][None]).reshape(lhs.shape)
    return np.array_equal(lhs, rhs)


@pytest.mark.parametrize("kind,ptype,q", SMALL)
def test_side_maps_are_injective_homomorphisms(kind, ptype, q):
    P = build_pair(kind, ptype, q)
    for side in (0, 1):
        V, m = P.vertex(side), P.maps[side]
        img = m.apply(V.elements)
        assert len(set(keys(img))) == V.order
        assert P.ambient.contains(img)
        assert _is_hom(P.field, V, m, img)
        assert np.array_equal(m.extract(img), V.elements)


@pytest.mark.parametrize("kind,ptype,q", SMALL)
def test_ambient_order(kind, ptype, q):
    P = build_pair(kind, ptype, q)
    assert P.ambient.order == P.expected_order()


def test_expected_orders_frozen():
    assert build_pair("ct", "A2", 2).expected_order() == 168
    assert build_pair("ct", "C2", 2).expected_order() == 720
    assert build_pair("ct", "TA3", 2).expected_order() == 25920
    assert build_pair("phan", "A2", 2).expected_order() == 216
    assert build_pair("phan", "C2", 3).expected_order() == 51840


def test_phan_pair_over_f2_needs_isometries():
    P = build_pair("phan", "A2", 2)
    assert P.generated.order < P.ambient.order == classical_order("SU3", 2)


def test_a1a1_sides_commute():
    P = build_ct_pair("A1A1", 3)
    assert images_commute(P)
    assert P.ambient.order == vertex_group("ct", 3).order ** 2
    assert not images_commute(build_pair("ct", "A2", 3))


def test_mixed_field_a1a1():
    P = build_ct_pair("A1A1", 2, 4)
    assert P.images[0].order == 6 and P.images[1].order == 60


def test_fundamental_root_groups_orders():
    P = build_pair("ct", "TA3", 2)
    X = fundamental_root_groups(P)
    assert X[(1, 1)].order == 4 and X[(2, 1)].order == 2
    with pytest.raises(ValueError):
        fundamental_root_groups(build_pair("phan", "A2", 2))


@pytest.mark.parametrize("ptype,q", [("A2", 2), ("A2", 3), ("C2", 2)])
def test_phan_tori_match_normalizers(ptype, q):
    tori = phan_tori(build_pair("phan", ptype, q))
    assert [T.order for T in tori.values()] == [q + 1, q + 1]

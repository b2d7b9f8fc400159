import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctphan.diagram import (
    Diagram,
    DiagramError,
    Edge,
    cycle,
    field_degrees,
    minimal_spanning_tree,
    path,
    tree_path,
    validate_3_spherical,
    vertex_q,
)


def test_rejects_bad_shapes():
    with pytest.raises(DiagramError):
        Diagram(2, [0, 1, 2], [Edge(0, 1, "A2", 0)])  # disconnected
    with pytest.raises(DiagramError):
        Diagram(2, [0, 1], [Edge(0, 0, "A2", 0)])
    with pytest.raises(DiagramError):
        Diagram(2, [0, 1], [Edge(0, 1, "A2", 0), Edge(1, 0, "A2", 0)])
    with pytest.raises(DiagramError):
        Diagram(2, [0, 1], [Edge(0, 1, "B2", 0)])
    with pytest.raises(DiagramError):
        Diagram(2, [0, 1], [Edge(0, 1, "C2", 5)])
    with pytest.raises(DiagramError):
        Diagram(2, [0], [])


def test_three_spherical():
    assert validate_3_spherical(path(2, ["A2", "C2"], [None, 1])) is None
    tri = cycle(2, ["A2"] * 3)
    v = validate_3_spherical(tri)
    assert v.reason == "triangle" and v.where == (0, 1, 2)
    heavy = path(2, ["C2", "C2"], [0, 1])
    assert validate_3_spherical(heavy).where == (1, 0, 2)
    assert validate_3_spherical(cycle(2, ["A2"] * 4)) is None


def test_field_degrees_along_ta3():
    d = path(2, ["A2", "TA3", "A2"], [None, 1, None])
    assert field_degrees(d) == {0: 2, 1: 2, 2: 1, 3: 1}
    assert vertex_q(d) == {0: 4, 1: 4, 2: 2, 3: 2}


def test_inconsistent_field_degrees():
    d = Diagram(2, range(4), [Edge(0, 1, "TA3", 1), Edge(1, 2, "A2", 1),
                              Edge(2, 3, "A2", 2), Edge(0, 3, "A2", 0)])
    with pytest.raises(DiagramError):
        field_degrees(d)


def test_json_round_trip_and_strictness():
    d = path(3, ["A2", "C2"], [None, 2])
    assert Diagram.from_json(d.to_json()) == d
    obj = d.to_json()
    obj["extra"] = 1
    with pytest.raises(DiagramError):
        Diagram.from_json(obj)
    obj = {"q": 2, "vertices": [0, 1], "edges": [{"i": 0, "j": 1, "type": "C2"}]}
    with pytest.raises(DiagramError):
        Diagram.from_json(obj)
    obj = {"v": 2, "q": 2, "vertices": [0, 1], "edges": [{"i": 0, "j": 1, "type": "A2"}]}
    with pytest.raises(DiagramError):
        Diagram.from_json(obj)


def test_spanning_tree_of_theta():
    d = Diagram(2, range(5), [Edge(0, 2, "A2", 0), Edge(1, 2, "A2", 1), Edge(0, 3, "A2", 0),
                              Edge(1, 3, "A2", 1), Edge(0, 4, "A2", 0), Edge(1, 4, "A2", 1)])
    t = minimal_spanning_tree(d)
    assert d.rank() == t.rank == 2
    assert len(t.tree) == 4
    for o in t.off:
        assert o.loop[0] == o.i and o.loop[-1] == o.j
        assert len(tree_path(t.tree, o.i, o.j)) >= 2


def test_spanning_tree_keeps_c2_edges():
    d = cycle(3, ["C2", "A2", "A2", "A2"], [1, None, None, None])
    t = minimal_spanning_tree(d)
    assert (0, 1) in t.tree
    assert t.rank == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 9), st.data())
def test_cycles_have_rank_one(n, data):
    types = ["A2"] * n
    if data.draw(st.booleans()):
        types[data.draw(st.integers(0, n - 1))] = "C2"
    d = cycle(2, types)
    assert validate_3_spherical(d) is None
    t = minimal_spanning_tree(d)
    assert t.rank == 1 and len(t.tree) == n - 1
    off = t.off[0]
    assert d.edge(off.i, off.j).type == "A2"

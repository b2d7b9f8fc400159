"""
Typed rank-2 diagrams: vertices joined by A2, C2 or TA3 edges.

A C2 edge records which endpoint carries the first side of the standard
pair; a TA3 edge records its q^2-side.  Missing edges stand for A1xA1.
"""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx

from .ffield import prime_power

EDGE_TYPES = ("A2", "C2", "TA3")
LABEL = {"A2": 3, "C2": 4, "TA3": 4}


class DiagramError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    i: int
    j: int
    type: str
    head: int

    @property
    def tail(self):
        return self.j if self.head == self.i else self.i

    def to_json(self):
        return {"i": self.i, "j": self.j, "type": self.type, "head": self.head}


class Diagram:
    """Immutable diagram over a base prime power q."""

    def __init__(self, q, vertices, edges):
        prime_power(q)
        self.q = int(q)
        self.vertices = tuple(sorted(int(v) for v in vertices))
        if len(set(self.vertices)) != len(self.vertices):
            raise DiagramError("repeated vertex")
        self._edges = {}
        for e in edges:
            if isinstance(e, dict):
                e = _edge_from_json(e)
            i, j = sorted((e.i, e.j))
            if i == j:
                raise DiagramError(f"loop at vertex {i}")
            if i not in self.vertices or j not in self.vertices:
                raise DiagramError(f"edge {{{i},{j}}} has an unknown endpoint")
            if e.type not in EDGE_TYPES:
                raise DiagramError(f"unknown edge type {e.type!r}")
            if e.head not in (i, j):
                raise DiagramError(f"head {e.head} is not an endpoint of {{{i},{j}}}")
            if (i, j) in self._edges:
                raise DiagramError(f"repeated edge {{{i},{j}}}")
            self._edges[(i, j)] = Edge(i, j, e.type, e.head)
        self.graph = nx.Graph()
        self.graph.add_nodes_from(self.vertices)
        self.graph.add_edges_from(self._edges)
        if not self.vertices or not nx.is_connected(self.graph):
            raise DiagramError("diagram is not connected")
        lonely = [v for v in self.vertices if self.graph.degree(v) == 0]
        if lonely:
            raise DiagramError(f"vertex {lonely[0]} lies on no edge")

    # basic access

    def edge_pairs(self):
        return sorted(self._edges)

    def edges(self):
        return [self._edges[k] for k in self.edge_pairs()]

    def edge(self, i, j):
        return self._edges.get(tuple(sorted((i, j))))

    def is_edge(self, i, j):
        return tuple(sorted((i, j))) in self._edges

    def neighbors(self, v):
        return sorted(self.graph.neighbors(v))

    def non_edges(self):
        vs = self.vertices
        return [(a, b) for k, a in enumerate(vs) for b in vs[k + 1:] if not self.is_edge(a, b)]

    def rank(self):
        """Homotopy rank |E| - |I| + 1."""
        return len(self._edges) - len(self.vertices) + 1

    def __eq__(self, other):
        return isinstance(other, Diagram) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash((self.q, self.vertices, tuple(self.edges())))

    def __repr__(self):
        return f"Diagram(q={self.q}, vertices={list(self.vertices)}, edges={len(self._edges)})"

    def to_json(self):
        return {"q": self.q, "vertices": list(self.vertices),
                "edges": [e.to_json() for e in self.edges()]}

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict):
            raise DiagramError("diagram must be a JSON object")
        extra = set(obj) - {"q", "vertices", "edges", "v"}
        if extra:
            raise DiagramError(f"unknown keys {sorted(extra)}")
        if obj.get("v", 1) != 1:
            raise DiagramError(f"unsupported schema version {obj['v']!r}")
        for k in ("q", "vertices", "edges"):
            if k not in obj:
                raise DiagramError(f"missing key {k!r}")
        if not isinstance(obj["q"], int):
            raise DiagramError("q must be an integer")
        return cls(obj["q"], obj["vertices"], [_edge_from_json(e) for e in obj["edges"]])


def _edge_from_json(e):
    if not isinstance(e, dict):
        raise DiagramError("edge must be a JSON object")
    extra = set(e) - {"i", "j", "type", "head"}
    if extra:
        raise DiagramError(f"unknown edge keys {sorted(extra)}")
    try:
        i, j, t = int(e["i"]), int(e["j"]), e["type"]
    except KeyError as exc:
        raise DiagramError(f"edge is missing {exc}") from None
    if t in ("C2", "TA3") and "head" not in e:
        raise DiagramError(f"{t} edge {{{i},{j}}} needs a head")
    return Edge(i, j, t, int(e.get("head", min(i, j))))


def path(q, types, heads=None):
    """Path 0 - 1 - ... with the given edge types; heads default to the lower end."""
    heads = heads or [None] * len(types)
    edges = [Edge(k, k + 1, t, k if h is None else h) for k, (t, h) in enumerate(zip(types, heads))]
    return Diagram(q, range(len(types) + 1), edges)


def cycle(q, types, heads=None):
    n = len(types)
    heads = heads or [None] * n
    edges = []
    for k, (t, h) in enumerate(zip(types, heads)):
        a, b = k, (k + 1) % n
        edges.append(Edge(a, b, t, min(a, b) if h is None else h))
    return Diagram(q, range(n), edges)


# -- validation ---------------------------------------------------------------


@dataclass
class Violation:
    reason: str
    where: tuple

    def to_json(self):
        return {"reason": self.reason, "where": list(self.where)}


def validate_3_spherical(d):
    """None if every rank-3 subdiagram is spherical, else a Violation.

    Over labels 3 and 4 this means: no triangles, and no vertex on two
    label-4 edges.
    """
    for a, b in d.edge_pairs():
        common = set(d.graph.neighbors(a)) & set(d.graph.neighbors(b))
        if common:
            return Violation("triangle", tuple(sorted((a, b, min(common)))))
    for v in d.vertices:
        heavy = [u for u in d.neighbors(v) if LABEL[d.edge(u, v).type] == 4]
        if len(heavy) > 1:
            return Violation("two label-4 edges at a vertex", (v, heavy[0], heavy[1]))
    return None


def field_exponents(d):
    """Per-vertex log2 of the field degree, normalized to minimum 0."""
    level = {d.vertices[0]: 0}
    for a, b in nx.bfs_edges(d.graph, d.vertices[0]):
        level[b] = level[a] + _step(d.edge(a, b), a, b)
    for e in d.edges():
        if level[e.j] - level[e.i] != _step(e, e.i, e.j):
            raise DiagramError(f"inconsistent field degrees around edge {{{e.i},{e.j}}}")
    low = min(level.values())
    return {v: level[v] - low for v in d.vertices}


def _step(e, a, b):
    if e.type != "TA3":
        return 0
    return 1 if e.head == b else -1


def field_degrees(d):
    """Vertex field degrees e_i over F_q (G_i = SL2(q^e_i))."""
    return {v: 2 ** k for v, k in field_exponents(d).items()}


def vertex_q(d):
    degs = field_degrees(d)
    return {v: d.q ** e for v, e in degs.items()}


# -- spanning tree ------------------------------------------------------------


@dataclass(frozen=True)
class OffTreeEdge:
    i: int
    j: int
    e: int
    loop: tuple  # closed walk i ... j, then back along the edge

    def to_json(self):
        return {"i": self.i, "j": self.j, "e": self.e, "loop": list(self.loop)}


@dataclass(frozen=True)
class TreeData:
    tree: tuple
    off: tuple

    @property
    def rank(self):
        return len(self.off)

    def to_json(self):
        return {"tree": [list(e) for e in self.tree], "off": [o.to_json() for o in self.off]}


def minimal_spanning_tree(d):
    """Remove off-tree A2 edges greedily by (field degree, vertex pair)."""
    degs = field_degrees(d)
    G = d.graph.copy()
    off = []
    while G.number_of_edges() > len(d.vertices) - 1:
        bridges = {tuple(sorted(b)) for b in nx.bridges(G)}
        candidates = sorted(
            (degs[a], (a, b)) for a, b in (tuple(sorted(x)) for x in G.edges)
            if (a, b) not in bridges and d.edge(a, b).type == "A2")
        chosen = None
        for e, (a, b) in candidates:
            loop = _loop(G, degs, a, b, e)
            if loop is not None:
                chosen = (a, b, e, loop)
                break
        if chosen is None:
            raise AssertionError("a cycle without a removable A2 edge")
        a, b, e, loop = chosen
        G.remove_edge(a, b)
        off.append(OffTreeEdge(a, b, e, loop))
    tree = tuple(sorted(tuple(sorted(x)) for x in G.edges))
    return TreeData(tree, tuple(off))


def _loop(G, degs, a, b, e):
    """Shortest a-b path avoiding the edge itself through vertices of degree >= e."""
    H = G.subgraph([v for v in G if degs[v] >= e]).copy()
    H.remove_edge(a, b)
    try:
        return tuple(nx.shortest_path(H, a, b))
    except nx.NetworkXNoPath:
        return None


def tree_path(tree, a, b):
    T = nx.Graph()
    T.add_edges_from(tree)
    return nx.shortest_path(T, a, b)

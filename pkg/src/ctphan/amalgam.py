"""
Curtis-Tits and Phan amalgams in coordinate form, and their classification.

An amalgam over a diagram is stored as the family of vertex automorphisms
delta[i, j] such that the connecting map G_i -> G_ij is the standard block
embedding composed with delta[i, j].  Normalization makes every delta
trivial except on one direction of each edge outside a spanning tree; the
C-coordinates left there form the invariant kappa.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .coeffsys import CoordinateError, VertexAut, edge_space, hexagon_solve, vspace
from .diagram import Diagram, DiagramError, field_degrees, minimal_spanning_tree, validate_3_spherical
from .matgrp import keys, matmul
from .rootdetect import property_D, weak_system
from .standard_pairs import build_ct_pair, build_phan_pair, root_group_elements

KINDS = ("ct", "phan")


class SpecError(ValueError):
    pass


# -- specs --------------------------------------------------------------------


def vertex_spaces(kind, d):
    if kind == "ct":
        return {v: vspace("ct", d.q ** e) for v, e in field_degrees(d).items()}
    if any(e.type == "TA3" for e in d.edges()):
        raise SpecError("Phan amalgams have no TA3 edges")
    return {v: vspace("phan", d.q) for v in d.vertices}


def edge_of(kind, d, a, b):
    """(EdgeSpace, {vertex: side}) for the edge {a, b}."""
    e = d.edge(a, b)
    vs = vertex_spaces(kind, d)
    es = edge_space(kind, e.type, vs[e.head].vq, vs[e.tail].vq)
    return es, {e.head: 0, e.tail: 1}


@dataclass
class AmalgamSpec:
    kind: str
    diagram: Diagram
    delta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown kind {self.kind!r}")
        bad = validate_3_spherical(self.diagram)
        if bad is not None:
            raise SpecError(f"diagram is not 3-spherical: {bad.reason} at {list(bad.where)}")
        self.spaces = vertex_spaces(self.kind, self.diagram)
        clean = {}
        for (i, j), a in self.delta.items():
            if i == j or i not in self.spaces or j not in self.spaces:
                raise SpecError(f"bad delta index ({i}, {j})")
            if a.space != self.spaces[i]:
                raise SpecError(f"delta ({i}, {j}) lives in the wrong group")
            if not a.is_identity():
                clean[(i, j)] = a
        self.delta = clean

    def d(self, i, j):
        return self.delta.get((i, j), self.spaces[i].identity())

    def directed_pairs(self):
        vs = self.diagram.vertices
        return [(i, j) for i in vs for j in vs if i != j]

    def to_json(self):
        out = []
        for (i, j) in sorted(self.delta):
            out.append({"from": i, "to": j, **self.delta[(i, j)].to_json()})
        return {"v": 1, "kind": self.kind, "diagram": self.diagram.to_json(), "delta": out}

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict):
            raise SpecError("amalgam must be a JSON object")
        extra = set(obj) - {"v", "kind", "diagram", "delta"}
        if extra:
            raise SpecError(f"unknown keys {sorted(extra)}")
        if obj.get("v", 1) != 1:
            raise SpecError(f"unsupported schema version {obj['v']!r}")
        if "kind" not in obj or "diagram" not in obj:
            raise SpecError("amalgam needs 'kind' and 'diagram'")
        d = Diagram.from_json(obj["diagram"])
        kind = obj["kind"]
        if kind not in KINDS:
            raise SpecError(f"unknown kind {kind!r}")
        spaces = vertex_spaces(kind, d)
        delta = {}
        for entry in obj.get("delta", []):
            if not isinstance(entry, dict):
                raise SpecError("delta entries must be objects")
            extra = set(entry) - {"from", "to", "t", "r", "s"}
            if extra:
                raise SpecError(f"unknown delta keys {sorted(extra)}")
            i, j = entry.get("from"), entry.get("to")
            if i not in spaces or j not in spaces or i == j:
                raise SpecError(f"bad delta index ({i}, {j})")
            if (i, j) in delta:
                raise SpecError(f"repeated delta ({i}, {j})")
            delta[(i, j)] = VertexAut.from_json(spaces[i], entry)
        return cls(kind, d, delta)


def make_standard(d, kind):
    return AmalgamSpec(kind, d, {})


@dataclass(frozen=True)
class KappaClass:
    kind: str
    q: int
    tree: object
    coords: tuple  # (r, s) per off-tree edge

    def to_json(self):
        return {"edges": [{"i": o.i, "j": o.j, "r": r, "s": s}
                          for o, (r, s) in zip(self.tree.off, self.coords)]}

    def is_identity(self):
        return all(c == (0, 0) for c in self.coords)


def kappa_domain(d, kind):
    """Moduli (R_s, S_s) of the C-coordinates on each off-tree edge."""
    tree = minimal_spanning_tree(d)
    spaces = vertex_spaces(kind, d)
    return tree, [(spaces[o.j].R, spaces[o.j].S) for o in tree.off]


def build_kappa(d, kind, coords):
    """Standard amalgam with g[j_s, i_s] twisted by the C-part coords[s]."""
    tree, dom = kappa_domain(d, kind)
    coords = list(coords)
    if len(coords) != len(dom):
        raise SpecError(f"expected {len(dom)} coordinates, got {len(coords)}")
    spaces = vertex_spaces(kind, d)
    delta = {}
    for o, (r, s), (R, S) in zip(tree.off, coords, dom):
        if not (0 <= r < R and 0 <= s < S):
            raise SpecError(f"coordinate ({r}, {s}) outside Z/{R} x Z/{S}")
        delta[(o.j, o.i)] = spaces[o.j].c(r, s)
    return AmalgamSpec(kind, d, delta)


# -- realization --------------------------------------------------------------


@dataclass
class RealizedAmalgam:
    kind: str
    q: int
    diagram: Diagram
    vertex: dict  # v -> GroupHandle
    pairs: dict  # (a, b), a < b -> (StandardPair, {vertex: side})
    images: dict  # (i, j) -> g_ij applied to the elements of G_i


def pair_of(kind, d, a, b):
    if d.is_edge(a, b):
        es, sides = edge_of(kind, d, a, b)
        return es.pair, sides
    spaces = vertex_spaces(kind, d)
    lo, hi = sorted((a, b))
    if kind == "ct":
        P = build_ct_pair("A1A1", spaces[lo].vq, spaces[hi].vq)
    else:
        P = build_phan_pair("A1A1", d.q)
    return P, {lo: 0, hi: 1}


def realize(spec, check=True):
    d = spec.diagram
    vertex = {v: sp.group for v, sp in spec.spaces.items()}
    pairs, images = {}, {}
    for a, b in itertools.combinations(d.vertices, 2):
        P, sides = pair_of(spec.kind, d, a, b)
        pairs[(a, b)] = (P, sides)
        for i, j in ((a, b), (b, a)):
            G = vertex[i]
            img = P.maps[sides[i]].apply(spec.d(i, j).apply(G.elements))
            if check:
                _check_embedding(P, G, img, (i, j))
            images[(i, j)] = img
    return RealizedAmalgam(spec.kind, d.q, d, vertex, pairs, images)


def _check_embedding(P, G, img, where):
    if len(set(keys(img))) != len(img):
        raise AssertionError(f"connecting map {where} is not injective")
    if not P.ambient.contains(img):
        raise AssertionError(f"connecting map {where} leaves the ambient group")
    # f(x g) = f(x) f(g) for every element x and generator g
    idx = G.locate(G.generators)
    prods = matmul(G.field, G.elements[:, None], G.generators[None])
    lhs = img[G.locate(prods.reshape(-1, 2, 2))].reshape(len(img), len(idx), *img.shape[1:])
    rhs = matmul(P.field, img[:, None], img[idx][None])
    if not np.array_equal(lhs, rhs):
        raise AssertionError(f"connecting map {where} is not a homomorphism")


def noncollapse_precheck(spec_or_realized):
    R = spec_or_realized
    if isinstance(R, AmalgamSpec):
        R = realize(R)
    return weak_system(R) if R.kind == "ct" else property_D(R)


# -- normalization ------------------------------------------------------------


@dataclass
class Witness:
    """phi[v] on vertices and (restriction to a, restriction to b) per pair."""

    phi: dict
    pair: dict

    def to_json(self):
        return {
            "vertices": [{"v": v, **a.to_json()} for v, a in sorted(self.phi.items())],
            "pairs": [{"i": a, "j": b, "res_i": ra.to_json(), "res_j": rb.to_json()}
                      for (a, b), (ra, rb) in sorted(self.pair.items())],
        }


def _distinguished_neighbor(d, u):
    for v in d.neighbors(u):
        if d.edge(u, v).type == "C2":
            return v
    return d.neighbors(u)[0]


def strip_tori(spec):
    """Isomorphic spec with torus-free deltas, plus the vertex part of the witness."""
    d = spec.diagram
    phi = {}
    delta = {}
    for u in d.vertices:
        w = _distinguished_neighbor(d, u)
        phi[u] = spec.d(u, w).torus_part
        for v in d.neighbors(u):
            delta[(u, v)] = spec.d(u, v).c_part
    out = AmalgamSpec(spec.kind, d, delta)
    return out, complete_witness(spec, out, phi)


def complete_witness(src, dst, phi):
    """Pair restrictions forced by phi; raises if some edge has no lift."""
    pair = {}
    for a, b in itertools.combinations(src.diagram.vertices, 2):
        ra = dst.d(a, b) @ phi[a] @ src.d(a, b).inverse()
        rb = dst.d(b, a) @ phi[b] @ src.d(b, a).inverse()
        if src.diagram.is_edge(a, b):
            es, sides = edge_of(src.kind, src.diagram, a, b)
            pr = (ra, rb) if sides[a] == 0 else (rb, ra)
            if not es.in_image(*pr):
                raise AssertionError(f"no edge automorphism over {{{a},{b}}}")
        pair[(a, b)] = (ra, rb)
    return Witness(dict(phi), pair)


def normalize(spec):
    """(normal form, KappaClass, witness) for a coordinate-form amalgam."""
    d = spec.diagram
    tree = minimal_spanning_tree(d)
    stripped, w1 = strip_tori(spec)
    spaces = spec.spaces
    root = d.vertices[0]
    psi = {root: spaces[root].identity()}
    tree_adj = {v: [] for v in d.vertices}
    for a, b in tree.tree:
        tree_adj[a].append(b)
        tree_adj[b].append(a)
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in sorted(tree_adj[u]):
            if v in psi:
                continue
            es, sides = edge_of(spec.kind, d, u, v)
            ident_u, ident_v = spaces[u].identity(), spaces[v].identity()
            psi[v], _ = hexagon_solve(es, sides[u], stripped.d(u, v), ident_u, psi[u],
                                   stripped.d(v, u), gplus_j=ident_v)
            queue.append(v)
    delta = {}
    coords = []
    for o in tree.off:
        es, sides = edge_of(spec.kind, d, o.i, o.j)
        k, _ = hexagon_solve(es, sides[o.i], stripped.d(o.i, o.j), spaces[o.i].identity(),
                         psi[o.i], stripped.d(o.j, o.i), phi_j=psi[o.j])
        delta[(o.j, o.i)] = k
        coords.append(k.ccoord())
    normal = AmalgamSpec(spec.kind, d, delta)
    phi = {v: psi[v] @ w1.phi[v] for v in d.vertices}
    witness = complete_witness(spec, normal, phi)
    return normal, KappaClass(spec.kind, d.q, tree, tuple(coords)), witness


def kappa(spec):
    return normalize(spec)[1]


def iso_decide(a, b):
    """(isomorphic?, kappa of a, kappa of b)."""
    if a.kind != b.kind:
        raise SpecError("amalgams of different kinds")
    if a.diagram != b.diagram:
        raise SpecError("amalgams over different diagrams")
    ka, kb = kappa(a), kappa(b)
    return ka.coords == kb.coords, ka, kb


def classify(d, kind):
    """One KappaClass per isomorphism class, in lexicographic coordinate order."""
    tree, dom = kappa_domain(d, kind)
    vertex_spaces(kind, d)
    factors = [list(itertools.product(range(R), range(S))) for R, S in dom]
    return [KappaClass(kind, d.q, tree, tuple(c)) for c in itertools.product(*factors)]


def class_count(d, kind):
    _, dom = kappa_domain(d, kind)
    return int(np.prod([R * S for R, S in dom])) if dom else 1


# -- witnesses on realized amalgams ------------------------------------------


def _pair_map(spec, a, b, ra, rb):
    """Concrete automorphism of the ambient group of {a, b} with the given restrictions."""
    d = spec.diagram
    if d.is_edge(a, b):
        es, sides = edge_of(spec.kind, d, a, b)
        e = es.lift(ra, rb) if sides[a] == 0 else es.lift(rb, ra)
        return e.apply
    P, sides = pair_of(spec.kind, d, a, b)
    by_side = {sides[a]: ra, sides[b]: rb}

    def apply(g):
        g = np.asarray(g)
        out = np.array(g, copy=True)
        for side, (lo, hi) in enumerate(((0, 2), (2, 4))):
            m = P.maps[side]
            block = np.broadcast_to(np.eye(4, dtype=np.int64), g.shape).copy()
            block[..., lo:hi, lo:hi] = g[..., lo:hi, lo:hi]
            moved = m.apply(by_side[side].apply(m.extract(block)))
            out[..., lo:hi, lo:hi] = moved[..., lo:hi, lo:hi]
        return out

    return apply


def verify_witness(src, dst, witness):
    """Check elementwise that the witness is an isomorphism of realized amalgams."""
    Ra, Rb = realize(src), realize(dst)
    report = {"vertices": True, "pairs": True, "failures": []}
    for v, a in witness.phi.items():
        G = Ra.vertex[v]
        if len(set(G.locate(a.apply(G.elements)).tolist()) - {-1}) != G.order:
            report["vertices"] = False
            report["failures"].append(["vertex", v])
    for (a, b), (ra, rb) in witness.pair.items():
        P, _ = Ra.pairs[(a, b)]
        Phi = _pair_map(src, a, b, ra, rb)
        amb = P.ambient
        if frozenset(keys(Phi(amb.elements))) != amb.keyset():
            report["pairs"] = False
            report["failures"].append(["not an automorphism", a, b])
            continue
        for i, j in ((a, b), (b, a)):
            G = Ra.vertex[i]
            lhs = Phi(Ra.images[(i, j)])
            moved = witness.phi[i].apply(G.elements)
            rhs = Rb.images[(i, j)][G.locate(moved)]
            if not np.array_equal(lhs, rhs):
                report["pairs"] = False
                report["failures"].append(["square does not commute", i, j])
    report["ok"] = report["vertices"] and report["pairs"]
    return report


# -- brute-force isomorphism oracle -------------------------------------------


def brute_force_isomorphic(a, b):
    """Search all vertex families phi in prod A_i for an isomorphism a -> b."""
    d = a.diagram
    order = d.vertices
    spaces = a.spaces
    choice = {}

    def consistent(u):
        for v in d.neighbors(u):
            if v not in choice:
                continue
            es, sides = edge_of(a.kind, d, u, v)
            ru = b.d(u, v) @ choice[u] @ a.d(u, v).inverse()
            rv = b.d(v, u) @ choice[v] @ a.d(v, u).inverse()
            pr = (ru, rv) if sides[u] == 0 else (rv, ru)
            if not es.in_image(*pr):
                return False
        return True

    def search(k):
        if k == len(order):
            return True
        u = order[k]
        for x in spaces[u].all():
            choice[u] = x
            if consistent(u) and search(k + 1):
                return True
        del choice[u]
        return False

    found = search(0)
    return found, (dict(choice) if found else None)


# -- orientation --------------------------------------------------------------

# In every standard pair X_1^+ and X_2^+ are fundamental root groups of one
# Borel, so the standard sign correlation is trivial on each type.
STANDARD_CORRELATION = 0


def orientation_check(spec):
    """(orientable?, offending cycle) from the tau-coordinates of the deltas."""
    if spec.kind != "ct":
        raise SpecError("orientation is defined for Curtis-Tits amalgams")
    d = spec.diagram
    flip = {}
    for a, b in d.edge_pairs():
        flip[(a, b)] = (spec.d(a, b).s + spec.d(b, a).s + STANDARD_CORRELATION) % 2
    sign = {d.vertices[0]: 0}
    queue = deque([d.vertices[0]])
    while queue:
        u = queue.popleft()
        for v in d.neighbors(u):
            w = flip[tuple(sorted((u, v)))]
            if v not in sign:
                sign[v] = sign[u] ^ w
                queue.append(v)
            elif sign[v] != sign[u] ^ w:
                return False, (u, v)
    return True, None


def _commute(F, A, B):
    return bool(np.array_equal(matmul(F, A[:, None], B[None]), matmul(F, B[None], A[:, None])))


def realized_orientable(spec):
    """Search sign assignments against the definition on the realized amalgam."""
    if spec.kind != "ct":
        raise SpecError("orientation is defined for Curtis-Tits amalgams")
    R = realize(spec)
    d = spec.diagram
    roots = {}
    for v, G in R.vertex.items():
        F = G.field
        roots[v] = {eps: G.locate(root_group_elements(F, eps)) for eps in (1, -1)}
    ok = {}
    for a, b in d.edge_pairs():
        P, _ = R.pairs[(a, b)]
        for ea in (1, -1):
            for eb in (1, -1):
                # same-sign fundamental root groups of one Borel do not commute
                good = all(
                    not _commute(P.field, R.images[(a, b)][roots[a][s * ea]],
                                 R.images[(b, a)][roots[b][s * eb]])
                    for s in (1, -1))
                ok[(a, b, ea, eb)] = good
    vs = d.vertices
    for signs in itertools.product((1, -1), repeat=len(vs) - 1):
        eps = dict(zip(vs, (1,) + signs))
        if all(ok[(a, b, eps[a], eps[b])] for a, b in d.edge_pairs()):
            return True
    return False


__all__ = [
    "AmalgamSpec", "CoordinateError", "DiagramError", "KappaClass", "RealizedAmalgam",
    "SpecError", "Witness", "brute_force_isomorphic", "build_kappa", "class_count", "classify",
    "complete_witness", "iso_decide", "kappa", "make_standard", "noncollapse_precheck",
    "normalize", "orientation_check", "realize", "realized_orientable", "strip_tori",
    "verify_witness", "vertex_spaces",
]

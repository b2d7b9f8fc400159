"""
Coordinates for the automorphisms normalizing the distinguished structure.

A vertex automorphism is a triple (t, r, s) acting on SL2 or SU2 as

    m  ->  tau^s( Frob^r( c_t(m) ) ),     c_t = conjugation by diag(t, 1),

where Frob is x -> x^p and tau is transpose-inverse.  For SU2 the torus
parameter has norm 1 and s is always 0 (tau coincides with a Frobenius
power there).  An edge automorphism is c_D for a diagonal D of the ambient
group followed by a field/graph part; it is determined by its two
restrictions, which is how it is stored.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .ffield import ff_special_constants, prime_power
from .matgrp import keys, matinv, matmul, transpose
from .standard_pairs import build_ct_pair, build_phan_pair, vertex_group


class CoordinateError(ValueError):
    pass


# -- vertex automorphisms -----------------------------------------------------


@dataclass(frozen=True)
class VSpace:
    """Automorphism coordinates of SL2(vq) (kind 'ct') or SU2(vq) ('phan')."""

    kind: str
    vq: int

    @property
    def group(self):
        return vertex_group(self.kind, self.vq)

    @property
    def field(self):
        return self.group.field

    @property
    def R(self):
        return self.field.e

    @property
    def S(self):
        return 2 if self.kind == "ct" else 1

    @cached_property
    def torus_values(self):
        F = self.field
        if self.kind == "ct":
            return tuple(range(1, F.order))
        sig = F.frobenius_table(F.e // 2)
        return tuple(t for t in range(1, F.order) if F.mul[t, sig[t]] == 1)

    def identity(self):
        return VertexAut(self, 1, 0, 0)

    def c(self, r=0, s=0):
        return VertexAut(self, 1, r % self.R, s % self.S)

    def torus(self, t):
        return VertexAut(self, int(t), 0, 0)

    def all(self):
        return [VertexAut(self, t, r, s) for t in self.torus_values
                for r in range(self.R) for s in range(self.S)]

    def order(self):
        return len(self.torus_values) * self.R * self.S

    def all_c(self):
        return [self.c(r, s) for r in range(self.R) for s in range(self.S)]


def vspace(kind, vq):
    return _vspace(kind, vq)


@lru_cache(maxsize=None)
def _vspace(kind, vq):
    prime_power(vq)
    return VSpace(kind, vq)


@dataclass(frozen=True)
class VertexAut:
    space: VSpace
    t: int
    r: int
    s: int

    def __post_init__(self):
        sp = self.space
        if self.t not in sp.torus_values:
            raise CoordinateError(f"torus coordinate {self.t} outside T for {sp}")
        if not (0 <= self.r < sp.R and 0 <= self.s < sp.S):
            raise CoordinateError(f"C coordinates ({self.r}, {self.s}) out of range for {sp}")

    def gamma(self, t):
        """Action of the C-part on torus coordinates."""
        F = self.space.field
        x = F.frobenius_power(int(t), self.r)
        return int(F.inv[x]) if self.s else int(x)

    def gamma_inv(self, t):
        F = self.space.field
        x = int(F.inv[int(t)]) if self.s else int(t)
        return int(F.frobenius_power(x, -self.r % F.e))

    def __matmul__(self, other):
        """self o other."""
        if other.space != self.space:
            raise CoordinateError("composing automorphisms of different groups")
        F = self.space.field
        t = int(F.mul[other.gamma_inv(self.t), other.t])
        return VertexAut(self.space, t, (self.r + other.r) % self.space.R,
                         (self.s + other.s) % self.space.S)

    def inverse(self):
        F = self.space.field
        return VertexAut(self.space, self.gamma(int(F.inv[self.t])),
                         -self.r % self.space.R, -self.s % self.space.S)

    @property
    def c_part(self):
        return VertexAut(self.space, 1, self.r, self.s)

    @property
    def torus_part(self):
        return VertexAut(self.space, self.t, 0, 0)

    def is_identity(self):
        return self.t == 1 and self.r == 0 and self.s == 0

    def apply(self, m):
        return apply_vertex_aut(self, m)

    def ccoord(self):
        return (self.r, self.s)

    def to_json(self):
        return {"t": self.space.field.coords(self.t), "r": self.r, "s": self.s}

    @classmethod
    def from_json(cls, space, obj):
        F = space.field
        t = obj.get("t", [1] + [0] * (F.e - 1))
        try:
            t = F.index(t) if isinstance(t, list) else int(t)
        except ValueError as exc:
            raise CoordinateError(str(exc)) from None
        r, s = int(obj.get("r", 0)), int(obj.get("s", 0))
        if not (0 <= r < space.R and 0 <= s < space.S):
            raise CoordinateError(f"(r, s) = ({r}, {s}) out of range for {space}")
        return cls(space, t, r, s)

    def __repr__(self):
        return f"VertexAut(t={self.space.field.coords(self.t)}, r={self.r}, s={self.s})"


def tau2(F, m):
    """Transpose-inverse of a batch of 2x2 determinant-one matrices."""
    out = np.empty_like(m)
    out[..., 0, 0] = m[..., 1, 1]
    out[..., 1, 1] = m[..., 0, 0]
    out[..., 0, 1] = F.neg[m[..., 1, 0]]
    out[..., 1, 0] = F.neg[m[..., 0, 1]]
    return out


def apply_vertex_aut(a, m):
    F = a.space.field
    m = np.array(m, dtype=np.int64, copy=True)
    if a.t != 1:
        m[..., 0, 1] = F.mul[m[..., 0, 1], a.t]
        m[..., 1, 0] = F.mul[m[..., 1, 0], F.inv[a.t]]
    if a.r:
        m = F.frobenius_power(m, a.r)
    if a.s:
        m = tau2(F, m)
    return m


def fit_vertex_aut(space, images_of_generators):
    """The coordinates acting on the generators of `space` as given, or None."""
    gens = space.group.generators
    target = np.asarray(images_of_generators)
    for a in space.all():
        if np.array_equal(apply_vertex_aut(a, gens), target):
            return a
    return None


# -- brute-force oracle -------------------------------------------------------


def _perm(G, images):
    return tuple(G.locate(images).tolist())


def brute_force_A(space):
    """Automorphisms of the vertex group normalizing its distinguished structure.

    Aut(G) is enumerated as the permutations induced by inner maps composed
    with all coordinate triples; those normalizing {X+, X-} (SL2) or the
    diagonal torus (SU2) are returned as a set of permutations, together
    with the permutations of the coordinate family itself.
    """
    from .standard_pairs import diagonal_torus, root_group_elements

    G = space.group
    F = space.field
    if space.kind == "ct":
        structure = {frozenset(keys(root_group_elements(F, +1))),
                     frozenset(keys(root_group_elements(F, -1)))}
    else:
        structure = {frozenset(keys(diagonal_torus("phan", F)))}

    def normalizes(images):
        moved = set()
        for sub in structure:
            idx = [G.index[k] for k in sub]
            moved.add(frozenset(keys(images[idx])))
        return moved == structure

    everything = set()
    normalizing = set()
    ginv = matinv(F, G.elements)
    for a in space.all():
        base = apply_vertex_aut(a, G.elements)
        for g, gi in zip(G.elements, ginv):
            images = matmul(F, matmul(F, g[None], base), gi[None])
            p = _perm(G, images)
            if p in everything:
                continue
            everything.add(p)
            if normalizes(images):
                normalizing.add(p)
    coords = {_perm(G, apply_vertex_aut(a, G.elements)) for a in space.all()}
    return normalizing, coords, len(everything)


# -- edges --------------------------------------------------------------------


def pair_for(kind, ptype, vq_head, vq_tail):
    """The standard pair for an edge whose sides live over the given fields."""
    if kind == "ct":
        if ptype == "TA3":
            if vq_head != vq_tail ** 2:
                raise CoordinateError("TA3 head field must be the square of the tail field")
            return build_ct_pair("TA3", vq_tail)
        if vq_head != vq_tail:
            raise CoordinateError(f"{ptype} edge joins different fields")
        return build_ct_pair(ptype, vq_head)
    if ptype == "TA3":
        raise CoordinateError("Phan amalgams have no TA3 edges")
    return build_phan_pair(ptype, vq_head)


class EdgeSpace:
    """Automorphisms of one standard pair that preserve both sides."""

    def __init__(self, kind, ptype, vq_head, vq_tail):
        self.kind = kind
        self.ptype = ptype
        self.pair = pair_for(kind, ptype, vq_head, vq_tail)
        self.sides = (vspace(kind, vq_head), vspace(kind, vq_tail))
        self.F = self.pair.field

    def __repr__(self):
        return f"EdgeSpace({self.kind}, {self.ptype}, {self.sides[0].vq}, {self.sides[1].vq})"

    # torus

    def transversal(self, t1, t2):
        """Diagonal D of the ambient whose conjugation restricts to (t1, t2)."""
        F = self.F
        emb1 = self.pair.maps[0]._emb
        emb2 = self.pair.maps[1]._emb
        x, y = int(emb1[t1]), int(emb2[t2])
        inv = F.inv
        if self.ptype == "A2":
            D = (x, 1, int(inv[y]))
        elif self.ptype == "C2" and self.kind == "ct":
            b = int(F.mul[y, x])
            D = (int(F.mul[x, b]), b, 1, x)
        elif self.ptype == "C2":
            D = (int(F.mul[y, x]), y, int(inv[x]), 1)
        elif self.ptype == "TA3":
            q = self.sides[1].vq
            n = int(inv[y])
            D = (x, 1, int(F.mul[F.power(x, -q), n]), n)
        else:
            raise CoordinateError(f"no torus transversal for {self.ptype}")
        return D

    def torus_restriction(self, D):
        """Closed form: (t1, t2) = (D_a/D_d-ratio of side 1, ... of side 2)."""
        F = self.F
        out = []
        for side, m in enumerate(self.pair.maps):
            b = next(s for s in m.slots if s.src == 1 and not s.sigma)
            ratio = int(F.mul[D[b.row], F.inv[D[b.col]]])
            back = int(m._back[ratio])
            if back < 0:
                raise CoordinateError("torus element does not restrict into the vertex field")
            out.append(back)
        return tuple(out)

    def in_gd(self, t1, t2):
        """Membership of the torus pair in the image of the standard torus.

        For C2 the standard torus diag(a^2 b, b, 1, a^2) restricts to a
        square on side 1; all other types restrict onto T_1 x T_2.
        """
        if self.ptype == "C2" and self.kind == "ct":
            F = self.sides[0].field
            return any(F.mul[a, a] == t1 for a in range(1, F.order))
        return True

    # C part

    def c_moduli(self):
        return self.sides[0].R, self.sides[0].S

    def c_restriction(self, r, s):
        """Closed form of the restriction of the edge C-part (r, s)."""
        s1, s2 = self.sides
        return s1.c(r, s), s2.c(r % s2.R, s)

    @cached_property
    def _ta3_constants(self):
        F = self.F
        eta, f, zeta = ff_special_constants(F)
        q = self.sides[1].vq
        z = zeta.value
        Z = (z, z, F.power(z, -q), F.power(z, -q))
        Dtau = self.transversal(1, self.pair.maps[1]._back[F.mul[eta.value, eta.value]])
        return Z, Dtau

    def _diag_conj(self, D, g):
        F = self.F
        D = np.asarray(D, dtype=np.int64)
        ratio = F.mul[D[:, None], F.inv[D][None, :]]
        return F.mul[g, ratio]

    def apply_c(self, r, s, g):
        """The ambient C-part: field part Frob^r, then the graph part tau^s."""
        F = self.F
        g = np.asarray(g, dtype=np.int64)
        if self.ptype == "TA3":
            Z, Dtau = self._ta3_constants
            for _ in range(r):
                g = self._diag_conj(Z, F.frobenius_power(g, 1))
            if s:
                g = self._diag_conj(Dtau, transpose(matinv(F, g)))
            return g
        if r:
            g = F.frobenius_power(g, r)
        if s:
            g = transpose(matinv(F, g))
        return g

    # elements

    def element(self, D, r, s):
        return EdgeAut(self, tuple(int(x) for x in D), r % self.c_moduli()[0],
                       s % self.c_moduli()[1])

    def identity(self):
        return self.element((1,) * self.pair.n, 0, 0)

    def in_image(self, v1, v2):
        """Is (v1, v2) the restriction of an edge automorphism?"""
        if v1.s != v2.s:
            return False
        if v1.r % v2.space.R != v2.r:
            return False
        return self.in_gd(v1.t, v2.t)

    def lift(self, v1, v2):
        if not self.in_image(v1, v2):
            raise CoordinateError(f"{v1}, {v2} is not a restriction on {self}")
        return self.element(self.transversal(v1.t, v2.t), v1.r, v1.s)

    def all_c(self):
        R, S = self.c_moduli()
        return [(r, s) for r in range(R) for s in range(S)]

    def all(self):
        s1, s2 = self.sides
        out = []
        for t1 in s1.torus_values:
            for t2 in s2.torus_values:
                if not self.in_gd(t1, t2):
                    continue
                for r, s in self.all_c():
                    out.append(self.element(self.transversal(t1, t2), r, s))
        return out


@dataclass(frozen=True)
class EdgeAut:
    """g -> C(r, s)( D g D^-1 ) on the ambient group of an edge."""

    space: EdgeSpace
    D: tuple
    r: int
    s: int

    def restrict(self):
        t1, t2 = self.space.torus_restriction(self.D)
        c1, c2 = self.space.c_restriction(self.r, self.s)
        return (c1 @ self.space.sides[0].torus(t1), c2 @ self.space.sides[1].torus(t2))

    def apply(self, g):
        return self.space.apply_c(self.r, self.s, self.space._diag_conj(self.D, g))

    def to_json(self):
        F = self.space.F
        return {"D": [F.coords(x) for x in self.D], "r": self.r, "s": self.s}


def edge_restrict(e):
    return e.restrict()


def functional_restriction(e, side):
    """Pull the ambient action back through the identification map of `side`."""
    sp = e.space.sides[side]
    m = e.space.pair.maps[side]
    images = m.extract(e.apply(m.apply(sp.group.generators)))
    return fit_vertex_aut(sp, images)


@lru_cache(maxsize=None)
def edge_space(kind, ptype, vq_head, vq_tail):
    return EdgeSpace(kind, ptype, vq_head, vq_tail)


def torus_restriction_index(es):
    """Index of the image of the standard torus in T_1 x T_2."""
    s1, s2 = es.sides
    total = len(s1.torus_values) * len(s2.torus_values)
    image = sum(1 for t1 in s1.torus_values for t2 in s2.torus_values if es.in_gd(t1, t2))
    return total // image


# -- hexagons on C-parts ------------------------------------------------------


def hexagon_solutions(es, side_i, gamma_i, gplus_i, phi_i, gamma_j, gplus_j=None, phi_j=None):
    """All completions of a hexagon on the edge `es`.

    Vertex i sits on side `side_i` of the standard pair.  All arguments are
    C-parts.  Exactly one of gplus_j, phi_j is given; each returned entry is
    (the other one, edge automorphism).
    """
    if (gplus_j is None) == (phi_j is None):
        raise ValueError("give exactly one of gplus_j and phi_j")
    sj = es.sides[1 - side_i]
    res_i = gplus_i @ phi_i @ gamma_i.inverse()
    out = []
    for v in sj.all_c():
        pair = (res_i, v) if side_i == 0 else (v, res_i)
        if not es.in_image(*pair):
            continue
        if phi_j is None:
            rest = gplus_j.inverse() @ v @ gamma_j
        else:
            rest = v @ gamma_j @ phi_j.inverse()
        out.append((rest, es.lift(*pair)))
    return out


def hexagon_solve(es, side_i, gamma_i, gplus_i, phi_i, gamma_j, gplus_j=None, phi_j=None):
    """The first completion in (r, s) order; unique unless i is a TA3 tail."""
    sols = hexagon_solutions(es, side_i, gamma_i, gplus_i, phi_i, gamma_j, gplus_j, phi_j)
    if not sols:
        raise AssertionError("hexagon has no solution")
    return sols[0]

"""
Standard Curtis-Tits and Phan pairs as explicit matrix groups.

A pair consists of an ambient rank-2 group together with two block embeddings
of SL2 (Curtis-Tits) or SU2 (Phan).  The images generate the ambient group
except for the Phan pairs over F_4 (q = 2), where the ambient is the full form
group and the blocks generate a subgroup of index 4 or 10.  Each embedding
is described by a placement template: every ambient entry is either a
constant or a scaled (and possibly sigma-conjugated) entry of the 2x2 source.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .ffield import embedding, ff_make, ff_special_constants, prime_power, restriction_table
from .matgrp import (
    Form,
    classical_order,
    closure,
    from_elements,
    identity,
    keys,
    matmul,
    small_generating_set,
)

PTYPES = ("A1A1", "A2", "C2", "TA3")
KINDS = ("ct", "phan")

A, B, C, D = range(4)


@dataclass(frozen=True)
class Slot:
    row: int
    col: int
    src: int | None  # index into (a, b, c, d), None for a constant
    scale: int = 1  # ambient encoding multiplying the entry (or the constant)
    sigma: bool = False


@dataclass
class SideMap:
    """Block embedding of a 2x2 group over `source` into n x n over `target`."""

    source: object
    target: object
    n: int
    slots: tuple

    @cached_property
    def _emb(self):
        return embedding(self.source, self.target)

    @cached_property
    def _back(self):
        return restriction_table(self.source, self.target)

    def _sigma(self, x):
        T = self.target
        return T.frobenius_power(x, T.e // 2)

    def apply(self, m):
        """Images of a batch (N, 2, 2) of source matrices."""
        m = np.asarray(m)
        single = m.ndim == 2
        m = m.reshape(-1, 2, 2)
        T = self.target
        src = self._emb[m]
        out = np.zeros((len(m), self.n, self.n), dtype=np.int64)
        for s in self.slots:
            if s.src is None:
                out[:, s.row, s.col] = s.scale
                continue
            x = src[:, s.src // 2, s.src % 2]
            if s.sigma:
                x = self._sigma(x)
            out[:, s.row, s.col] = T.mul[x, s.scale]
        return out[0] if single else out

    def extract(self, g):
        """Inverse of `apply` on the image (no membership check)."""
        g = np.asarray(g)
        single = g.ndim == 2
        g = g.reshape(-1, self.n, self.n)
        T = self.target
        out = np.zeros((len(g), 2, 2), dtype=np.int64)
        done = set()
        for s in self.slots:
            if s.src is None or s.src in done:
                continue
            x = T.mul[g[:, s.row, s.col], T.inv[s.scale]]
            if s.sigma:
                x = self._sigma(x)
            out[:, s.src // 2, s.src % 2] = self._back[x]
            done.add(s.src)
        if np.any(out < 0):
            raise ValueError("entries outside the source field")
        return out[0] if single else out


def _block(r0, c0, scale=1):
    return tuple(Slot(r0 + i, c0 + j, 2 * i + j, scale) for i in range(2) for j in range(2))


def _ones(n, positions, one=1):
    return tuple(Slot(k, k, None, one) for k in positions)


def sl2_elements(F):
    """All of SL2(F) in a fixed order."""
    n = F.order
    rows = []
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if a:
                    d = int(F.mul[F.add[1, F.mul[b, c]], F.inv[a]])
                    rows.append((a, b, c, d))
            if not a and b:
                c = int(F.neg[F.inv[b]])
                for d in range(n):
                    rows.append((0, b, c, d))
    return np.array(rows, dtype=np.int64).reshape(-1, 2, 2)


def sl2_generators(F):
    """Upper and lower unitriangular matrices over an additive basis of F."""
    basis = [F.p ** k for k in range(F.e)]
    gens = []
    for b in basis:
        gens.append([[1, b], [0, 1]])
        gens.append([[1, 0], [b, 1]])
    return np.array(gens, dtype=np.int64)


def su2_elements(F):
    """All [[a, b], [-b^s, a^s]] with a a^s + b b^s = 1 over F = F_{q^2}."""
    h = F.e // 2
    sig = F.frobenius_table(h)
    norm = F.mul[np.arange(F.order), sig]
    rows = []
    for a in range(F.order):
        for b in range(F.order):
            if F.add[norm[a], norm[b]] == 1:
                rows.append((a, b, int(F.neg[sig[b]]), int(sig[a])))
    return np.array(rows, dtype=np.int64).reshape(-1, 2, 2)


@lru_cache(maxsize=None)
def vertex_group(kind, q):
    """SL2(q) over F_q (Curtis-Tits) or SU2(q) over F_{q^2} (Phan)."""
    p, k = prime_power(q)
    if kind == "ct":
        F = ff_make(p, k)
        G = from_elements(F, sl2_elements(F), sl2_generators(F))
    elif kind == "phan":
        F = ff_make(p, 2 * k)
        G = from_elements(F, su2_elements(F))
        G.generators = small_generating_set(G)
    else:
        raise ValueError(f"unknown kind {kind}")
    return G


def upper(F, b):
    return np.array([[1, b], [0, 1]], dtype=np.int64)


def lower(F, c):
    return np.array([[1, 0], [c, 1]], dtype=np.int64)


def root_group_elements(F, sign):
    make = upper if sign > 0 else lower
    return np.array([make(F, x) for x in range(F.order)])


def diagonal_torus(kind, F):
    """diag(a, a^-1) in SL2(F), or diag(a, a^s) with a^(q+1) = 1 in SU2(q)."""
    if kind == "ct":
        vals = range(1, F.order)
        return np.array([[[a, 0], [0, int(F.inv[a])]] for a in vals], dtype=np.int64)
    sig = F.frobenius_table(F.e // 2)
    vals = [a for a in range(1, F.order) if F.mul[a, sig[a]] == 1]
    return np.array([[[a, 0], [0, int(sig[a])]] for a in vals], dtype=np.int64)


def form_isometries(F, n, forms):
    """Determinant-one matrices preserving all `forms`, by a row-wise search.

    Rows r_i must satisfy r_i M r_j^T = M_ij (symplectic, as g^T is symplectic
    too) and r_i G r_j^(sigma T) = G_ij (hermitian).
    """
    import itertools

    from .matgrp import det

    vecs = np.array(list(itertools.product(range(F.order), repeat=n)), dtype=np.int64)
    sig = F.frobenius_table(F.e // 2) if F.e % 2 == 0 else None

    def pair_value(form, u, v):
        w = v if form.kind == "symplectic" else sig[v]
        acc = 0
        for i in range(n):
            for j in range(n):
                if form.gram[i, j]:
                    acc = F.add[acc, F.mul[F.mul[u[i], form.gram[i, j]], w[j]]]
        return int(acc)

    def fits(rows, v):
        k = len(rows)
        for form in forms:
            if pair_value(form, v, v) != form.gram[k, k]:
                return False
            for i, u in enumerate(rows):
                if pair_value(form, u, v) != form.gram[i, k]:
                    return False
                if pair_value(form, v, u) != form.gram[k, i]:
                    return False
        return True

    def extend(rows):
        if len(rows) == n:
            g = np.array(rows)
            if det(F, g) == 1:
                yield g
            return
        for v in vecs:
            if fits(rows, v):
                yield from extend(rows + [v])

    yield from extend([])


def _hyperbolic(F, n, sign):
    M = np.zeros((n, n), dtype=np.int64)
    h = n // 2
    for k in range(h):
        M[k, h + k] = 1
        M[h + k, k] = 1 if sign > 0 else int(F.neg[1])
    return M


@dataclass
class StandardPair:
    kind: str
    ptype: str
    q: int
    field: object  # ambient field
    vertex_q: tuple  # base prime powers of the two vertex groups
    maps: tuple  # (SideMap, SideMap)
    forms: tuple
    ambient_name: str | None

    @property
    def n(self):
        return self.maps[0].n

    def vertex(self, side):
        return vertex_group(self.kind, self.vertex_q[side])

    @cached_property
    def images(self):
        out = []
        for side in (0, 1):
            V = self.vertex(side)
            m = self.maps[side]
            G = from_elements(self.field, m.apply(V.elements), m.apply(V.generators))
            out.append(G)
        return tuple(out)

    def expected_order(self):
        if self.ambient_name is None:
            return self.vertex(0).order * self.vertex(1).order
        return classical_order(self.ambient_name, self.q)

    @cached_property
    def generated(self):
        """closure of the two side images"""
        gens = np.concatenate([self.images[0].generators, self.images[1].generators])
        G, _ = closure(self.field, gens)
        return G

    @cached_property
    def ambient(self):
        G = self.generated
        target = self.expected_order()
        if G.order < target and self.kind == "phan":
            # the two SU2 blocks generate a proper subgroup when q = 2; the
            # ambient is the full form group, reached by adding isometries
            gens = list(G.generators)
            for g in form_isometries(self.field, self.n, self.forms):
                if G.contains(g[None]):
                    continue
                gens.append(g)
                G, _ = closure(self.field, np.array(gens))
                if G.order >= target:
                    break
        G.formtags = list(self.forms)
        return G

    def side_generators(self, side):
        return self.images[side].generators

    def root_group(self, side, sign):
        """Image of the upper (sign=+1) or lower (sign=-1) unitriangular group."""
        F = self.vertex(side).field
        return from_elements(self.field, self.maps[side].apply(root_group_elements(F, sign)))

    def torus(self, side):
        F = self.vertex(side).field
        return from_elements(self.field, self.maps[side].apply(diagonal_torus(self.kind, F)))


def _ct_templates(ptype, F, Fv1, Fv2, eta=None):
    neg1 = int(F.neg[1])
    if ptype == "A2":
        return 3, (_block(0, 0) + _ones(3, [2]), _block(1, 1) + _ones(3, [0]))
    if ptype == "C2":
        s1 = _block(0, 0) + (
            Slot(2, 2, D), Slot(2, 3, C, neg1), Slot(3, 2, B, neg1), Slot(3, 3, A))
        s2 = _ones(4, [0, 2]) + (Slot(1, 1, A), Slot(1, 3, B), Slot(3, 1, C), Slot(3, 3, D))
        return 4, (s1, s2)
    if ptype == "TA3":
        s1 = _block(0, 0) + (
            Slot(2, 2, D, 1, True), Slot(2, 3, C, neg1, True),
            Slot(3, 2, B, neg1, True), Slot(3, 3, A, 1, True))
        s2 = _ones(4, [0, 2]) + (
            Slot(1, 1, A), Slot(1, 3, B, eta), Slot(3, 1, C, int(F.inv[eta])), Slot(3, 3, D))
        return 4, (s1, s2)
    if ptype == "A1A1":
        return 4, (_block(0, 0) + _ones(4, [2, 3]), _block(2, 2) + _ones(4, [0, 1]))
    raise ValueError(f"unknown pair type {ptype}")


def _phan_templates(ptype):
    if ptype == "A2":
        return 3, (_block(0, 0) + _ones(3, [2]), _block(1, 1) + _ones(3, [0]))
    if ptype == "C2":
        s1 = _block(0, 0) + (
            Slot(2, 2, A, 1, True), Slot(2, 3, B, 1, True),
            Slot(3, 2, C, 1, True), Slot(3, 3, D, 1, True))
        s2 = _ones(4, [0, 2]) + (Slot(1, 1, A), Slot(1, 3, B), Slot(3, 1, C), Slot(3, 3, D))
        return 4, (s1, s2)
    if ptype == "A1A1":
        return 4, (_block(0, 0) + _ones(4, [2, 3]), _block(2, 2) + _ones(4, [0, 1]))
    raise ValueError(f"no Phan pair of type {ptype}")


@lru_cache(maxsize=None)
def build_ct_pair(ptype, q, q2=None):
    """Curtis-Tits standard pair of the given type over F_q.

    For A1A1 the two factors may live over different fields (q and q2);
    the ambient field is then the larger one.
    """
    p, k = prime_power(q)
    if ptype == "TA3":
        F = ff_make(p, 2 * k)
        vq = (q * q, q)
        eta = ff_special_constants(F)[0].value
        n, (s1, s2) = _ct_templates(ptype, F, None, None, eta)
        forms = (Form("hermitian", _hyperbolic(F, 4, +1)),)
        name = "SU4"
    elif ptype == "A1A1":
        q2 = q if q2 is None else q2
        big = max(q, q2)
        pb, kb = prime_power(big)
        F = ff_make(pb, kb)
        vq = (q, q2)
        n, (s1, s2) = _ct_templates(ptype, F, None, None)
        forms = ()
        name = None
    else:
        F = ff_make(p, k)
        vq = (q, q)
        n, (s1, s2) = _ct_templates(ptype, F, None, None)
        forms = (Form("symplectic", _hyperbolic(F, 4, -1)),) if ptype == "C2" else ()
        name = {"A2": "SL3", "C2": "Sp4"}[ptype]
    maps = (
        SideMap(vertex_group("ct", vq[0]).field, F, n, s1),
        SideMap(vertex_group("ct", vq[1]).field, F, n, s2),
    )
    return StandardPair("ct", ptype, q, F, vq, maps, forms, name)


@lru_cache(maxsize=None)
def build_phan_pair(ptype, q):
    """Phan standard pair of the given type over F_{q^2}."""
    p, k = prime_power(q)
    F = ff_make(p, 2 * k)
    n, (s1, s2) = _phan_templates(ptype)
    herm = Form("hermitian", identity(n))
    if ptype == "A2":
        forms, name = (herm,), "SU3"
    elif ptype == "C2":
        forms, name = (Form("symplectic", _hyperbolic(F, 4, -1)), herm), "Sp4"
    else:
        forms, name = (), None
    maps = (SideMap(F, F, n, s1), SideMap(F, F, n, s2))
    return StandardPair("phan", ptype, q, F, (q, q), maps, forms, name)


def build_pair(kind, ptype, q):
    if kind == "ct":
        return build_ct_pair(ptype, q)
    if kind == "phan":
        return build_phan_pair(ptype, q)
    raise ValueError(f"unknown kind {kind}")


def fundamental_root_groups(pair):
    """The explicit groups X_1^+, X_1^-, X_2^+, X_2^- of a Curtis-Tits pair."""
    if pair.kind != "ct":
        raise ValueError("root groups are defined for Curtis-Tits pairs")
    return {(side + 1, sign): pair.root_group(side, sign) for side in (0, 1) for sign in (1, -1)}


def phan_tori(pair):
    """D_1^2 and D_2^1, checked against the normalizer definition."""
    from .matgrp import normalizer

    if pair.kind != "phan" or pair.ptype not in ("A2", "C2"):
        raise ValueError("tori are defined for Phan pairs of type A2 or C2")
    out = {}
    for side in (0, 1):
        explicit = pair.torus(side)
        other = pair.images[1 - side]
        brute = normalizer(pair.images[side], other)
        if brute.keyset() != explicit.keyset():
            raise AssertionError(f"torus mismatch on side {side + 1}")
        out[side + 1] = explicit
    return out


def images_commute(pair):
    F = pair.field
    g1, g2 = pair.side_generators(0), pair.side_generators(1)
    left = matmul(F, g1[:, None], g2[None])
    right = matmul(F, g2[None], g1[:, None])
    return bool(np.all(left == right))


def subgroup_from_keys(G, ks):
    idx = np.array(sorted(G.index[k] for k in ks))
    return from_elements(G.field, G.elements[idx])


def keyset_of(A):
    return frozenset(keys(A))

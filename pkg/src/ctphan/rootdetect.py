"""
Brute-force detection of fundamental root groups and Phan tori.

For a Curtis-Tits pair, every Sylow p-subgroup X of one side image is tested
by enumerating the group it generates together with the other side image.
Proper subgroups that fix a subspace are parabolic; the only proper
irreducible case is the C2(2) exception.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .matgrp import (
    closure,
    commutator,
    from_elements,
    identity,
    keys,
    matinv,
    matmul,
    normalizer,
    sylow_p_family,
)

PARABOLIC_PLUS = "Parabolic(+)"
PARABOLIC_MINUS = "Parabolic(-)"
FULL = "Full"
EXCEPTIONAL = "ExceptionalC2_2"


@dataclass
class SylowEntry:
    subgroup: object
    tag: str
    order: int
    witness: dict = field(default_factory=dict)

    def to_json(self, F):
        out = {"tag": self.tag, "closure_order": self.order}
        if "subspace" in self.witness:
            out["subspace"] = [[F.coords(int(x)) for x in v] for v in self.witness["subspace"]]
        if "decomposition" in self.witness:
            out["decomposition"] = self.witness["decomposition"]
        return out


def _apply(F, g, v):
    acc = [0] * len(v)
    for i in range(len(v)):
        s = 0
        for j, x in enumerate(v):
            if x and g[i][j]:
                s = F.add[s, F.mul[g[i][j], x]]
        acc[i] = int(s)
    return tuple(acc)


def _span_add(F, span, u):
    out = set(span)
    for w in span:
        for c in range(1, F.order):
            out.add(tuple(int(F.add[a, F.mul[c, b]]) for a, b in zip(w, u)))
    return out


def _points(F, n):
    """One normalized representative per 1-dimensional subspace."""
    import itertools

    for v in itertools.product(range(F.order), repeat=n):
        nz = [x for x in v if x]
        if nz and nz[0] == 1:
            yield v


def invariant_subspace(F, n, gens):
    """Basis of a proper nonzero subspace fixed by all `gens`, or None."""
    gens = [[[int(x) for x in row] for row in g] for g in gens]
    for v in _points(F, n):
        basis = [v]
        span = _span_add(F, {tuple([0] * n)}, v)
        queue = [v]
        while queue and len(basis) < n:
            w = queue.pop()
            for g in gens:
                u = _apply(F, g, w)
                if u not in span:
                    basis.append(u)
                    span = _span_add(F, span, u)
                    queue.append(u)
                    if len(basis) == n:
                        break
        if len(basis) < n:
            return basis
    return None


_verdicts = {}


def classify_sylows(pair, side):
    """Verdict table for the Sylow p-subgroups of side `side` (1 or 2)."""
    if pair.kind != "ct":
        raise ValueError("Sylow classification applies to Curtis-Tits pairs")
    ck = (pair.kind, pair.ptype, pair.q, side)
    if ck in _verdicts:
        return _verdicts[ck]
    F = pair.field
    j, i = side - 1, 2 - side
    Gj = pair.images[j]
    plus, minus = pair.root_group(j, +1), pair.root_group(j, -1)
    amb = pair.ambient.order
    table = []
    for X in sylow_p_family(Gj, plus):
        gens = np.concatenate([pair.side_generators(i), X.elements])
        H, count = closure(F, gens, stop_above=amb // 2)
        if H.elements is None:
            # more than half of the ambient group: it is the ambient group
            table.append(SylowEntry(X, FULL, amb))
            continue
        W = invariant_subspace(F, pair.n, H.generators)
        if W is not None:
            xk = X.keyset()
            if xk == plus.keyset():
                tag = PARABOLIC_PLUS
            elif xk == minus.keyset():
                tag = PARABOLIC_MINUS
            else:
                tag = "Parabolic(?)"
            table.append(SylowEntry(X, tag, H.order, {"subspace": W}))
        else:
            table.append(SylowEntry(X, EXCEPTIONAL, H.order,
                                    {"decomposition": _decomposition(pair, i, X, H)}))
    _verdicts[ck] = table
    return table


def _decomposition(pair, i, X, H):
    """Check H = (G_i x G_i^x) : <x> for an involution x in X."""
    F = pair.field
    Gi = pair.images[i]
    ident = identity(pair.n)
    x = next(g for g in X.elements if not np.array_equal(g, ident))
    conj = matmul(F, matmul(F, x[None], Gi.elements), matinv(F, x)[None])
    conj_keys = frozenset(keys(conj))
    commute = np.array_equal(
        matmul(F, Gi.generators[:, None], conj[None]),
        matmul(F, conj[None], Gi.generators[:, None]))
    return {
        "order": int(H.order),
        "factor_order": int(Gi.order),
        "factors_commute": bool(commute),
        "factors_meet_trivially": len(conj_keys & Gi.keyset()) == 1,
        "semidirect_order_matches": H.order == 2 * Gi.order ** 2,
    }


def tag_counts(table):
    out = {}
    for e in table:
        out[e.tag] = out.get(e.tag, 0) + 1
    return out


def fundamental_pair(pair, side):
    """The two parabolic Sylows (X^+, X^-) of side `side`."""
    table = classify_sylows(pair, side)
    found = {e.tag: e.subgroup for e in table if e.tag.startswith("Parabolic")}
    if len(found) != 2 or set(found) != {PARABOLIC_PLUS, PARABOLIC_MINUS}:
        raise AssertionError(f"expected two signed parabolic Sylows, got {sorted(found)}")
    return found[PARABOLIC_PLUS], found[PARABOLIC_MINUS]


def subgroups_commute(F, H, K):
    a, b = H.elements, K.elements
    return bool(np.array_equal(matmul(F, a[:, None], b[None]), matmul(F, b[None], a[:, None])))


def sign_correlation(pair):
    """0 if X_1^+ and X_2^+ share a Borel (X_1^+ commutes with X_2^-), else 1."""
    F = pair.field
    p1, _ = fundamental_pair(pair, 1)
    p2, m2 = fundamental_pair(pair, 2)
    same = not subgroups_commute(F, p1, p2) and subgroups_commute(F, p1, m2)
    opposite = subgroups_commute(F, p1, p2) and not subgroups_commute(F, p1, m2)
    if same == opposite:
        raise AssertionError("root groups do not determine a sign correlation")
    return 0 if same else 1


def borel(pair, sign=+1):
    """N(U) for U generated by the two root groups of the given sign."""
    F = pair.field
    X1 = pair.root_group(0, sign)
    X2 = pair.root_group(1, sign)
    U, _ = closure(F, np.concatenate([X1.elements, X2.elements]))
    return U, normalizer(pair.ambient, U)


# -- amalgam-level detection ---------------------------------------------------


@dataclass
class Detection:
    ok: bool
    system: dict = field(default_factory=dict)
    witness: dict | None = None


def _pullback(images, sub_keys):
    return frozenset(int(i) for i, k in enumerate(keys(images)) if k in sub_keys)


def weak_system(realized):
    """Consistent pair {X_j^+, X_j^-} at every vertex, or a failure witness."""
    per_vertex = {}
    for (a, b) in realized.diagram.edge_pairs():
        pair, sides = realized.pairs[(a, b)]
        for j, i in ((a, b), (b, a)):
            Xp, Xm = fundamental_pair(pair, sides[j] + 1)
            img = realized.images[(j, i)]
            found = (_pullback(img, Xp.keyset()), _pullback(img, Xm.keyset()))
            if any(len(s) != Xp.order for s in found):
                return Detection(False, witness={
                    "vertex": j, "edge": [i, j], "reason": "image is not the standard side"})
            per_vertex.setdefault(j, []).append((i, found))
    system = {}
    for j, entries in sorted(per_vertex.items()):
        i0, ref = entries[0]
        for i, found in entries[1:]:
            if frozenset(found) != frozenset(ref):
                return Detection(False, witness={
                    "vertex": j, "edges": [[i0, j], [i, j]],
                    "pairs": [[sorted(s) for s in ref], [sorted(s) for s in found]]})
        system[j] = ref
    return Detection(True, system)


def property_D(realized):
    """Common torus at every vertex of a Phan amalgam, or a failure witness."""
    per_vertex = {}
    for (a, b) in realized.diagram.edge_pairs():
        pair, sides = realized.pairs[(a, b)]
        for j, i in ((a, b), (b, a)):
            D = pair.torus(sides[j])
            pulled = _pullback(realized.images[(j, i)], D.keyset())
            per_vertex.setdefault(j, []).append((i, pulled))
    system = {}
    for j, entries in sorted(per_vertex.items()):
        common = frozenset.intersection(*(s for _, s in entries))
        size = realized.q + 1
        if len(common) != size or any(len(s) != size for _, s in entries):
            bad = next((i, s) for i, s in entries if s != entries[0][1])
            return Detection(False, witness={
                "vertex": j, "edges": [[entries[0][0], j], [bad[0], j]],
                "tori": [sorted(entries[0][1]), sorted(bad[1])]})
        system[j] = common
    return Detection(True, system)


def torus_uniqueness(pair):
    """Each D_j^i is the only Gbar_j-conjugate torus normalized by D_i^j."""
    if pair.kind != "phan":
        raise ValueError("torus uniqueness is a Phan statement")
    F = pair.field
    report = {}
    for j in (0, 1):
        i = 1 - j
        Dj, Di = pair.torus(j), pair.torus(i)
        tori = sylow_p_family(pair.images[j], Dj)
        normalized, centralized = [], 0
        for T in tori:
            tk = T.keyset()
            conj = matmul(F, matmul(F, Di.elements[:, None], T.elements[None]),
                          matinv(F, Di.elements)[:, None])
            if all(k in tk for k in keys(conj)):
                normalized.append(T)
                centralized += subgroups_commute(F, Di, T)
        report[j + 1] = {
            "tori": len(tori),
            "normalized": len(normalized),
            "centralized": int(centralized),
            "is_standard": len(normalized) == 1 and normalized[0].keyset() == Dj.keyset(),
        }
    return all(r["is_standard"] for r in report.values()), report


def root_commutator_trivial(F, H, K):
    return all(np.array_equal(commutator(F, h, k), identity(h.shape[-1]))
               for h in H.elements for k in K.elements)


__all__ = [
    "EXCEPTIONAL", "FULL", "PARABOLIC_MINUS", "PARABOLIC_PLUS", "Detection", "SylowEntry",
    "borel", "classify_sylows", "from_elements", "fundamental_pair", "invariant_subspace",
    "property_D", "root_commutator_trivial", "sign_correlation", "subgroups_commute",
    "tag_counts", "torus_uniqueness", "weak_system",
]

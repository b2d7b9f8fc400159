"""
Small matrix groups over finite fields.

Matrices are integer numpy arrays of field encodings with shape (..., n, n);
every operation here is vectorized over leading batch axes.  Groups are
enumerated by breadth-first closure and hashed by the raw bytes of their
entries.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field as dc_field

import numpy as np

from .ffield import FieldSpec, prime_power

DEFAULT_BUDGET = 20_000_000
SLOW_THRESHOLD = 1_000_000


class BudgetExceeded(RuntimeError):
    def __init__(self, message, count=None):
        super().__init__(message)
        self.count = count


def element_budget():
    return int(os.environ.get("CTPHAN_BUDGET", DEFAULT_BUDGET))


# -- matrix arithmetic -------------------------------------------------------

def identity(n, batch=()):
    out = np.zeros(tuple(batch) + (n, n), dtype=np.int64)
    idx = np.arange(n)
    out[..., idx, idx] = 1
    return out


def mat(F, rows):
    """Build a matrix from nested rows of encodings, FieldElems or coordinate lists."""
    def enc(x):
        if hasattr(x, "value"):
            return x.value
        if isinstance(x, (list, tuple)):
            return F.index(x)
        return int(x) % F.order if int(x) >= 0 else int(F.neg[(-int(x)) % F.p])
    return np.array([[enc(x) for x in row] for row in rows], dtype=np.int64)


def matmul(F, A, B):
    prods = F.mul[A[..., :, :, None], B[..., None, :, :]]
    acc = prods[..., 0, :]
    for j in range(1, prods.shape[-2]):
        acc = F.add[acc, prods[..., j, :]]
    return acc


def det(F, A):
    n = A.shape[-1]
    if n == 1:
        return A[..., 0, 0]
    if n == 2:
        return F.sub[F.mul[A[..., 0, 0], A[..., 1, 1]], F.mul[A[..., 0, 1], A[..., 1, 0]]]
    total = np.zeros(A.shape[:-2], dtype=np.int64)
    for j in range(n):
        minor = np.delete(np.delete(A, 0, axis=-2), j, axis=-1)
        term = F.mul[A[..., 0, j], det(F, minor)]
        total = F.add[total, term] if j % 2 == 0 else F.sub[total, term]
    return total


def adjugate(F, A):
    n = A.shape[-1]
    if n == 1:
        return np.ones_like(A)
    out = np.zeros_like(A)
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(A, i, axis=-2), j, axis=-1)
            c = det(F, minor)
            out[..., j, i] = c if (i + j) % 2 == 0 else F.neg[c]
    return out


def matinv(F, A):
    d = det(F, A)
    if np.any(d == 0):
        raise ZeroDivisionError("singular matrix")
    return F.mul[adjugate(F, A), F.inv[d][..., None, None]]


def transpose(A):
    return np.swapaxes(A, -1, -2)


def frobenius(F, A, k):
    return F.frobenius_power(A, k) if k % F.e else A


def conjugate(F, g, A, g_inv=None):
    """g A g^{-1}."""
    g_inv = matinv(F, g) if g_inv is None else g_inv
    return matmul(F, matmul(F, g, A), g_inv)


def keys(A):
    """Hashable byte keys for a batch of matrices (or a single matrix)."""
    n2 = A.shape[-1] * A.shape[-2]
    flat = np.ascontiguousarray(A.reshape(-1, n2).astype(np.uint8))
    return flat.view(np.dtype((np.void, n2))).ravel().tolist()


def key(A):
    return keys(A)[0]


# -- groups ------------------------------------------------------------------

@dataclass
class Form:
    kind: str  # "symplectic" or "hermitian"
    gram: np.ndarray


@dataclass
class GroupHandle:
    field: FieldSpec
    dim: int
    generators: np.ndarray
    elements: np.ndarray | None = None
    formtags: list = dc_field(default_factory=list)
    _index: dict | None = dc_field(default=None, repr=False)

    @property
    def order(self):
        if self.elements is None:
            raise ValueError("group not enumerated")
        return len(self.elements)

    @property
    def index(self):
        if self._index is None:
            self._index = {k: i for i, k in enumerate(keys(self.elements))}
        return self._index

    def keyset(self):
        return frozenset(self.index)

    def locate(self, A):
        """Element indices of a batch of matrices, -1 where absent."""
        idx = self.index
        return np.array([idx.get(k, -1) for k in keys(A)], dtype=np.int64)

    def contains(self, A):
        return bool(np.all(self.locate(A) >= 0))

    def __len__(self):
        return self.order


def closure(F, generators, budget=None, stop_above=None):
    """Enumerate the group generated by `generators` by BFS over right products.

    If `stop_above` is given and the element count exceeds it, enumeration
    halts and None is returned for the elements (the caller knows the
    subgroup is then the full ambient group by Lagrange).
    """
    gens = np.asarray(generators, dtype=np.int64)
    if gens.ndim == 2:
        gens = gens[None]
    n = gens.shape[-1]
    if gens.shape[0] and np.any(det(F, gens) == 0):
        raise ValueError("non-invertible generator")
    budget = element_budget() if budget is None else budget
    start = identity(n)[None]
    index = {key(start[0]): 0}
    chunks = [start]
    frontier = start
    count = 1
    while len(frontier) and len(gens):
        prods = matmul(F, frontier[:, None], gens[None]).reshape(-1, n, n)
        fresh = []
        for pos, k in enumerate(keys(prods)):
            if k not in index:
                index[k] = count
                count += 1
                fresh.append(pos)
        frontier = prods[fresh]
        chunks.append(frontier)
        if stop_above is not None and count > stop_above:
            return GroupHandle(F, n, gens, None), count
        if count > budget:
            raise BudgetExceeded(f"closure exceeded budget of {budget} elements", count)
    elements = np.concatenate(chunks)
    return GroupHandle(F, n, gens, elements, _index=index), count


def group(F, generators, budget=None, formtags=()):
    G, _ = closure(F, generators, budget=budget)
    G.formtags = list(formtags)
    return G


def from_elements(F, elements, generators=None):
    elements = np.asarray(elements, dtype=np.int64)
    n = elements.shape[-1]
    gens = elements if generators is None else np.asarray(generators, dtype=np.int64)
    return GroupHandle(F, n, gens, elements)


def classical_order(kind, q):
    prime_power(q)
    orders = {
        "SL2": q * (q ** 2 - 1),
        "SU2": q * (q ** 2 - 1),
        "SL3": q ** 3 * (q ** 3 - 1) * (q ** 2 - 1),
        "Sp4": q ** 4 * (q ** 2 - 1) * (q ** 4 - 1),
        "SU3": q ** 3 * (q ** 2 - 1) * (q ** 3 + 1),
        "SU4": q ** 6 * (q ** 2 - 1) * (q ** 3 + 1) * (q ** 4 - 1),
    }
    if kind not in orders:
        raise ValueError(f"unknown group type {kind}")
    return orders[kind]


def subgroup_keys(G, sub):
    if isinstance(sub, GroupHandle):
        return sub.keyset()
    return frozenset(keys(sub))


def sylow_p_family(G, seed):
    """All G-conjugates of the subgroup `seed`, in order of first appearance."""
    F = G.field
    seed_elems = seed.elements if isinstance(seed, GroupHandle) else np.asarray(seed)
    inv = matinv(F, G.elements)
    seen = {}
    for g, gi in zip(G.elements, inv):
        conj = matmul(F, matmul(F, g[None], seed_elems), gi[None])
        ks = frozenset(keys(conj))
        if ks not in seen:
            seen[ks] = conj
    return [from_elements(F, c) for c in seen.values()]


def small_generating_set(G):
    """Greedy generating set: walk the elements, keep those not yet generated."""
    F = G.field
    gens = []
    current = frozenset([key(identity(G.dim))])
    for x in G.elements:
        if key(x) in current:
            continue
        gens.append(x)
        H, _ = closure(F, np.array(gens))
        current = H.keyset()
        if len(current) == G.order:
            break
    return np.array(gens) if gens else identity(G.dim)[None]


def _gens(H):
    return H.generators if H.generators is not None and len(H.generators) else H.elements


def normalizer(G, H):
    F = G.field
    hk = subgroup_keys(G, H)
    hgens = _gens(H)
    inv = matinv(F, G.elements)
    conj = matmul(F, matmul(F, G.elements[:, None], hgens[None]), inv[:, None])
    ok = [all(k in hk for k in keys(c)) for c in conj]
    return from_elements(F, G.elements[np.array(ok, dtype=bool)])


def centralizer(G, H):
    F = G.field
    hgens = _gens(H)
    left = matmul(F, G.elements[:, None], hgens[None])
    right = matmul(F, hgens[None], G.elements[:, None])
    ok = np.all((left == right).reshape(len(G.elements), -1), axis=1)
    return from_elements(F, G.elements[ok])


def commutator(F, a, b):
    return matmul(F, matmul(F, a, b), matinv(F, matmul(F, b, a)))


def derived_subgroup(G):
    """Normal closure of the commutators of the generators."""
    F = G.field
    gens = _gens(G)
    comms = [commutator(F, a, b) for a in gens for b in gens]
    D, _ = closure(F, np.array(comms))
    while True:
        dk = D.keyset()
        extra = []
        for g in gens:
            conj = conjugate(F, g[None], D.generators)
            extra.extend(c for c, k in zip(conj, keys(conj)) if k not in dk)
        if not extra:
            return D
        D, _ = closure(F, np.concatenate([D.generators, np.array(extra)]))


def sigma_power(F):
    """Exponent k with x -> x^(p^k) the involution of a quadratic extension."""
    if F.e % 2:
        raise ValueError(f"{F!r} is not a quadratic extension")
    return F.e // 2


def preserves_form(F, g, form):
    g = np.asarray(g)
    M = form.gram
    if form.kind == "symplectic":
        lhs = matmul(F, matmul(F, transpose(g), M), g)
    elif form.kind == "hermitian":
        lhs = matmul(F, matmul(F, transpose(g), M), frobenius(F, g, sigma_power(F)))
    else:
        raise ValueError(f"unknown form kind {form.kind}")
    return bool(np.all(lhs == M))


def mat_to_json(F, A):
    return [[F.coords(int(x)) for x in row] for row in A]


def mat_from_json(F, rows):
    return mat(F, rows)

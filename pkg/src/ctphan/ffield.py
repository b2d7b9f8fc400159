"""
Arithmetic in small finite fields F_{p^e}.

Elements are stored as integers 0 <= x < p^e encoding the coefficient vector
of the polynomial basis in base p (c_0 is the least significant digit), so
0 and 1 are the field's zero and one.  All operations are table lookups.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

FIELD_BOUND = int(os.environ.get("CTPHAN_FIELD_BOUND", 81))

# Monic moduli, low coefficient first.  For e >= 2 these are the Conway
# polynomials, so the root x is primitive and subfields embed compatibly.
# Prime fields use the degree-1 modulus x.
MODULI = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 1, 1, 0, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (5, 2): (2, 4, 1),
    (7, 2): (3, 6, 1),
}


class FieldError(ValueError):
    pass


def is_prime(n):
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n ** 0.5) + 1))


def _polymulmod(a, b, modulus, p):
    e = len(modulus) - 1
    prod = [0] * (2 * e - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    for k in range(len(prod) - 1, e - 1, -1):
        c = prod[k]
        if c:
            for j in range(e + 1):
                prod[k - e + j] = (prod[k - e + j] - c * modulus[j]) % p
    return tuple(prod[:e])


class FieldSpec:
    """The field F_{p^e} given by a fixed monic modulus."""

    def __init__(self, p, e, modulus):
        self.p = p
        self.e = e
        self.modulus = tuple(modulus)
        self.order = p ** e
        n = self.order
        digits = np.arange(n)
        self.coord_table = np.zeros((n, e), dtype=np.int64)
        for k in range(e):
            self.coord_table[:, k] = digits % p
            digits = digits // p
        weights = p ** np.arange(e)
        summed = (self.coord_table[:, None, :] + self.coord_table[None, :, :]) % p
        self.add = summed @ weights
        self.neg = ((-self.coord_table) % p) @ weights
        self.sub = self.add[:, self.neg]

        # multiplicative structure through a primitive element
        coords = [tuple(int(c) for c in row) for row in self.coord_table]
        if e == 1:
            gen = next(g for g in range(1, n) if self._is_primitive_mod_p(g))
            exp = [pow(gen, k, p) for k in range(n - 1)]
        else:
            x = tuple(1 if k == 1 else 0 for k in range(e))
            exp = [1]
            cur = coords[1]
            for _ in range(n - 2):
                cur = _polymulmod(cur, x, self.modulus, p)
                exp.append(int(np.dot(cur, weights)))
            gen = p
        if len(set(exp)) != n - 1 or 0 in exp:
            raise FieldError(f"modulus {self.modulus} is not primitive over F_{p}")
        self.generator = gen
        self.exp = np.array(exp + exp, dtype=np.int64)
        self.log = np.full(n, -1, dtype=np.int64)
        self.log[np.array(exp)] = np.arange(n - 1)
        lg = self.log
        self.mul = np.zeros((n, n), dtype=np.int64)
        nz = np.arange(1, n)
        self.mul[1:, 1:] = self.exp[(lg[nz][:, None] + lg[nz][None, :]) % (n - 1)]
        self.inv = np.zeros(n, dtype=np.int64)
        self.inv[1:] = self.exp[(-lg[nz]) % (n - 1)]
        self.frob = np.zeros(n, dtype=np.int64)
        self.frob[1:] = self.exp[(lg[nz] * p) % (n - 1)]

    def _is_primitive_mod_p(self, g):
        p = self.p
        return len({pow(g, k, p) for k in range(1, p)}) == p - 1

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and (self.p, self.e, self.modulus) == (
            other.p, other.e, other.modulus)

    def __hash__(self):
        return hash((self.p, self.e, self.modulus))

    def __repr__(self):
        return f"GF({self.p}^{self.e})"

    # element helpers on raw integer encodings

    def index(self, coords):
        coords = list(coords)
        if len(coords) != self.e or any(not 0 <= c < self.p for c in coords):
            raise FieldError(f"bad coordinates {coords} for {self!r}")
        return int(sum(c * self.p ** k for k, c in enumerate(coords)))

    def coords(self, x):
        return [int(c) for c in self.coord_table[x]]

    def power(self, x, k):
        if x == 0:
            if k < 0:
                raise ZeroDivisionError("zero has no inverse")
            return 1 if k == 0 else 0
        return int(self.exp[(int(self.log[x]) * k) % (self.order - 1)])

    def frobenius_power(self, x, k):
        """x^(p^k) on encodings (vectorized over arrays)."""
        k %= self.e
        if k == 0:
            return x
        if np.isscalar(x):
            return self.power(int(x), self.p ** k)
        table = self.frobenius_table(k)
        return table[x]

    @lru_cache(maxsize=None)
    def frobenius_table(self, k):
        k %= self.e
        out = np.arange(self.order)
        for _ in range(k):
            out = self.frob[out]
        return out

    def lex_order(self):
        """Encodings sorted by lexicographic coordinate order (c_0 first)."""
        return sorted(range(self.order), key=lambda x: self.coords(x))

    def subfield(self, d):
        """Encodings of the degree-d subfield."""
        if self.e % d:
            raise FieldError(f"{d} does not divide {self.e}")
        table = self.frobenius_table(d)
        return np.flatnonzero(table == np.arange(self.order))

    def elem(self, value):
        if isinstance(value, (list, tuple)):
            value = self.index(value)
        return FieldElem(self, int(value))

    def elements(self):
        return [FieldElem(self, x) for x in range(self.order)]

    @property
    def zero(self):
        return FieldElem(self, 0)

    @property
    def one(self):
        return FieldElem(self, 1)


@dataclass(frozen=True)
class FieldElem:
    field: FieldSpec
    value: int

    @property
    def coords(self):
        return self.field.coords(self.value)

    def _other(self, other):
        if isinstance(other, FieldElem):
            if other.field != self.field:
                raise FieldError("mixed fields")
            return other.value
        if isinstance(other, int):
            # integers act through the prime field, whose encodings are 0..p-1
            return other % self.field.p
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        return FieldElem(self.field, int(self.field.add[self.value, o]))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return FieldElem(self.field, int(self.field.sub[self.value, o]))

    def __rsub__(self, other):
        o = self._other(other)
        return FieldElem(self.field, int(self.field.sub[o, self.value]))

    def __neg__(self):
        return FieldElem(self.field, int(self.field.neg[self.value]))

    def __mul__(self, other):
        o = self._other(other)
        return FieldElem(self.field, int(self.field.mul[self.value, o]))

    __rmul__ = __mul__

    def inverse(self):
        if self.value == 0:
            raise ZeroDivisionError("zero has no inverse")
        return FieldElem(self.field, int(self.field.inv[self.value]))

    def __truediv__(self, other):
        o = FieldElem(self.field, self._other(other))
        return self * o.inverse()

    def __pow__(self, k):
        return FieldElem(self.field, self.field.power(self.value, k))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.coords}"


def ff_make(p, e, bound=None):
    """Return F_{p^e} with the table modulus."""
    bound = FIELD_BOUND if bound is None else bound
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if e < 1 or p ** e > bound:
        raise FieldError(f"F_{p}^{e} is outside the supported range (<= {bound})")
    return _make(p, e)


@lru_cache(maxsize=None)
def _make(p, e):
    if e == 1:
        return FieldSpec(p, 1, (0, 1))
    if (p, e) not in MODULI:
        raise FieldError(f"no table modulus for F_{p}^{e}")
    return FieldSpec(p, e, MODULI[(p, e)])


def prime_power(q):
    """Split q = p^k; raise if q is not a prime power."""
    for p in range(2, q + 1):
        if q % p == 0:
            k, r = 0, q
            while r % p == 0:
                r //= p
                k += 1
            if r != 1 or not is_prime(p):
                break
            return p, k
    raise FieldError(f"{q} is not a prime power")


def field_of_order(q):
    p, k = prime_power(q)
    return ff_make(p, k)


def ff_frobenius(x, k):
    """x^(p^k)."""
    return FieldElem(x.field, int(x.field.frobenius_power(x.value, k)))


def ff_norm_trace(x, subfield_degree):
    """Relative norm and trace down to the subfield of the given degree."""
    F = x.field
    if subfield_degree < 1 or F.e % subfield_degree:
        raise FieldError(f"{subfield_degree} does not divide {F.e}")
    norm = x
    trace = x
    for j in range(1, F.e // subfield_degree):
        conj = ff_frobenius(x, j * subfield_degree)
        norm = norm * conj
        trace = trace + conj
    return norm, trace


@lru_cache(maxsize=None)
def embedding(small, big):
    """Array sending encodings of `small` to encodings of `big`.

    Uses the compatibility of the table moduli: the generator of the small
    field maps to g^((|big|-1)/(|small|-1)) for the generator g of the big one.
    """
    if small.p != big.p or big.e % small.e:
        raise FieldError(f"{small!r} is not a subfield of {big!r}")
    out = np.zeros(small.order, dtype=np.int64)
    if small.e == 1:
        # prime field: constants
        for c in range(small.p):
            out[c] = c
        return out
    step = (big.order - 1) // (small.order - 1)
    image = np.zeros(small.order, dtype=np.int64)
    image[1:] = big.exp[(small.log[1:] * step) % (big.order - 1)]
    out[:] = image
    # the image of the generator must satisfy the small modulus
    root = int(out[small.generator])
    acc = 0
    for k, c in enumerate(small.modulus):
        acc = int(big.add[acc, big.mul[c, big.power(root, k)]])
    if acc != 0:
        raise FieldError(f"table moduli of {small!r} and {big!r} are not compatible")
    return out


def restriction_table(small, big):
    """Inverse of `embedding`: big encodings -> small encodings, -1 outside."""
    emb = embedding(small, big)
    back = np.full(big.order, -1, dtype=np.int64)
    back[emb] = np.arange(small.order)
    return back


def ff_special_constants(F):
    """(eta, f, zeta) for F = F_{q^2}.

    eta: smallest nonzero element with eta + eta^q = 0.
    f:   eta^(p-1), the scalar with (eta)^p = f * eta; it lies in F_q and has
         norm -1 down to F_p.
    zeta: smallest element with N_{F_{q^2}/F_q}(zeta) = f^{-1}.
    """
    if F.e % 2:
        raise FieldError(f"{F!r} is not a quadratic extension")
    half = F.e // 2
    order = F.lex_order()
    eta = next(x for x in order if x and F.add[x, F.frobenius_power(x, half)] == 0)
    f = F.power(eta, F.p - 1)
    q = F.p ** half
    target = int(F.inv[f])
    zeta = next(x for x in order if x and F.power(x, q + 1) == target)
    return FieldElem(F, int(eta)), FieldElem(F, int(f)), FieldElem(F, int(zeta))

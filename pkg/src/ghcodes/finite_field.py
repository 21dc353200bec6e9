"""Exact arithmetic in GF(p^e) over the power basis of a primitive element.

Elements are stored as coordinate vectors (c_0, ..., c_{e-1}) over F_p with
respect to {1, w, ..., w^(e-1)} and encoded as the little-endian base-p
integer ``sum(c_i * p**i)``.  With this encoding the prime subfield F_p is
exactly the codes ``0..p-1``, ``w`` is the code ``p`` (for e > 1), and
truncating the coordinates to the first ``e`` entries is reduction mod p^e.

All heavy lifting is table driven: every FieldSpec carries q x q addition and
multiplication tables (q <= 625 at desk scale), so vectors and matrices of
codes can be combined with numpy fancy indexing.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

MAX_DESK_Q = 5**4


class FieldError(ValueError):
    """Base class for field construction and arithmetic errors."""


class NonPrimeError(FieldError):
    pass


class NotPrimitiveError(FieldError):
    pass


class FieldMismatchError(FieldError):
    pass


class DegreeMismatchError(FieldError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _digits(code: int, p: int, e: int) -> tuple[int, ...]:
    out = []
    for _ in range(e):
        code, d = divmod(code, p)
        out.append(d)
    return tuple(out)


def power_sequence(p: int, e: int, poly: Sequence[int]) -> list[int] | None:
    """Codes of w^0, w^1, ..., w^(q-2), or None when w is not primitive."""
    q = p**e
    shift = [p**i for i in range(e)]
    vec = [1] + [0] * (e - 1)
    seen = set()
    seq = []
    for _ in range(q - 1):
        code = sum(c * s for c, s in zip(vec, shift))
        if code == 0 or code in seen:
            return None
        seen.add(code)
        seq.append(code)
        # multiply by w: shift up, fold the top coefficient through the relation
        top = vec[-1]
        vec = [0] + vec[:-1]
        vec = [(v + top * c) % p for v, c in zip(vec, poly)]
    if vec != [1] + [0] * (e - 1):
        return None
    return seq


def _primitive_root(p: int) -> int:
    for g in range(1, p):
        if len({pow(g, k, p) for k in range(p - 1)}) == p - 1:
            return g
    raise AssertionError("unreachable for prime p")


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """GF(p^e) with w^e = c_0 + c_1 w + ... + c_{e-1} w^(e-1).

    Build instances with :func:`make_field`; it validates primality and
    primitivity and caches one object per (p, e, poly).
    """

    p: int
    e: int
    poly: tuple[int, ...]
    q: int = dc_field(init=False)
    exp: np.ndarray = dc_field(init=False, repr=False)
    log: np.ndarray = dc_field(init=False, repr=False)
    add_table: np.ndarray = dc_field(init=False, repr=False)
    sub_table: np.ndarray = dc_field(init=False, repr=False)
    mul_table: np.ndarray = dc_field(init=False, repr=False)
    neg_table: np.ndarray = dc_field(init=False, repr=False)
    inv_table: np.ndarray = dc_field(init=False, repr=False)
    frob_table: np.ndarray = dc_field(init=False, repr=False)
    coords: np.ndarray = dc_field(init=False, repr=False)

    def __post_init__(self):
        p, e = self.p, self.e
        q = p**e
        if e == 1:
            g = _primitive_root(p)
            seq = [pow(g, k, p) for k in range(p - 1)]
        else:
            seq = power_sequence(p, e, self.poly)
            if seq is None:
                raise NotPrimitiveError(f"poly {list(self.poly)} is not primitive over F_{p}")
        exp = np.array(seq, dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        log[exp] = np.arange(q - 1)

        coords = np.array([_digits(c, p, e) for c in range(q)], dtype=np.int64).reshape(q, e)
        weights = p ** np.arange(e, dtype=np.int64)
        add = ((coords[:, None, :] + coords[None, :, :]) % p) @ weights
        sub = ((coords[:, None, :] - coords[None, :, :]) % p) @ weights
        neg = ((-coords) % p) @ weights

        mul = np.zeros((q, q), dtype=np.int64)
        nz = np.arange(1, q)
        mul[1:, 1:] = exp[(log[nz][:, None] + log[nz][None, :]) % (q - 1)]
        inv = np.zeros(q, dtype=np.int64)
        inv[1:] = exp[(-log[nz]) % (q - 1)]
        frob = np.zeros(q, dtype=np.int64)
        frob[1:] = exp[(log[nz] * p) % (q - 1)]

        for name, value in [
            ("q", q), ("exp", exp), ("log", log), ("add_table", add),
            ("sub_table", sub), ("mul_table", mul), ("neg_table", neg),
            ("inv_table", inv), ("frob_table", frob), ("coords", coords),
        ]:
            if isinstance(value, np.ndarray):
                value.setflags(write=False)
            object.__setattr__(self, name, value)

    # identity is (p, e, poly); tables are derived
    def _key(self):
        return (self.p, self.e, self.poly)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"GF({self.p}^{self.e}, poly={list(self.poly)})"

    def __call__(self, code: int) -> Felt:
        return Felt(self, int(code))

    def __iter__(self):
        return (Felt(self, c) for c in range(self.q))

    def __len__(self):
        return self.q

    @property
    def zero(self) -> Felt:
        return Felt(self, 0)

    @property
    def one(self) -> Felt:
        return Felt(self, 1)

    @property
    def w(self) -> Felt:
        return Felt(self, int(self.exp[1 % (self.q - 1)]))

    def power(self, k: int) -> Felt:
        """w^k for any integer k."""
        return Felt(self, int(self.exp[k % (self.q - 1)]))

    def from_coords(self, coords: Sequence[int]) -> Felt:
        if len(coords) != self.e:
            raise FieldError(f"expected {self.e} coordinates, got {len(coords)}")
        return Felt(self, sum((int(c) % self.p) * self.p**i for i, c in enumerate(coords)))

    def power_order(self) -> np.ndarray:
        """Codes of 0, 1, w, ..., w^(q-2) in that order (the paper's listing order)."""
        return np.concatenate([[0], self.exp])

    # -- vectorised helpers on integer code arrays --
    def add(self, a, b):
        return self.add_table[a, b]

    def sub(self, a, b):
        return self.sub_table[a, b]

    def mul(self, a, b):
        return self.mul_table[a, b]

    def frob(self, a):
        return self.frob_table[a]

    def render(self, code: int) -> str:
        """Power notation: '0', '1', 'w', 'w^k'."""
        code = int(code)
        if code == 0:
            return "0"
        k = int(self.log[code])
        if k == 0:
            return "1"
        if k == 1:
            return "w"
        return f"w^{k}"

    def parse(self, token: str) -> Felt:
        """Inverse of :meth:`render`; also accepts a bare integer code."""
        token = token.strip()
        if token in ("w", "ω"):
            return self.power(1)
        for prefix in ("w^", "ω^"):
            if token.startswith(prefix):
                return self.power(int(token[len(prefix):]))
        code = int(token)
        if not 0 <= code < self.q:
            raise FieldError(f"code {code} out of range for {self!r}")
        return Felt(self, code)


@functools.lru_cache(maxsize=None)
def _cached_field(p: int, e: int, poly: tuple[int, ...]) -> FieldSpec:
    return FieldSpec(p, e, poly)


def make_field(p: int, e: int = 1, poly: Sequence[int] | None = None,
               allow_large: bool = False) -> FieldSpec:
    """Return GF(p^e) with the given (or the default) primitive relation.

    The default relation is the primitive one whose coefficient tuple
    (c_0, ..., c_{e-1}) has the smallest base-p encoding.  For e = 1 the
    relation is empty and w is the smallest primitive root mod p.
    """
    if not is_prime(p):
        raise NonPrimeError(f"{p} is not prime")
    if e < 1:
        raise FieldError(f"extension degree must be >= 1, got {e}")
    if p**e > MAX_DESK_Q and not allow_large:
        raise FieldError(f"q = {p}^{e} exceeds desk scale ({MAX_DESK_Q}); pass allow_large=True")
    if e == 1:
        if poly:
            raise FieldError("a prime field takes no defining relation")
        return _cached_field(p, 1, ())
    if poly is not None:
        poly = tuple(int(c) for c in poly)
        if len(poly) != e or any(not 0 <= c < p for c in poly):
            raise FieldError(f"poly must have {e} coefficients in [0, {p})")
        return _cached_field(p, e, poly)
    return _cached_field(p, e, default_poly(p, e))


@functools.lru_cache(maxsize=None)
def default_poly(p: int, e: int) -> tuple[int, ...]:
    """Primitive relation with the smallest base-p encoding of (c_0, ..., c_{e-1})."""
    if e == 1:
        return ()
    for code in range(1, p**e):
        cand = _digits(code, p, e)
        if cand[0] == 0:
            continue
        if power_sequence(p, e, cand) is not None:
            return cand
    raise AssertionError("every finite field has a primitive element")


@dataclass(frozen=True)
class Felt:
    """An element of a FieldSpec, stored by its integer code."""

    field: FieldSpec
    code: int

    def __post_init__(self):
        if not 0 <= self.code < self.field.q:
            raise FieldError(f"code {self.code} out of range for {self.field!r}")

    @property
    def coords(self) -> tuple[int, ...]:
        return tuple(int(c) for c in self.field.coords[self.code])

    def _other(self, other) -> int:
        if isinstance(other, Felt):
            if other.field != self.field:
                raise FieldMismatchError(f"{self.field!r} vs {other.field!r}")
            return other.code
        if isinstance(other, int):
            # integers embed through the prime subfield
            return other % self.field.p
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return Felt(self.field, int(self.field.add_table[self.code, b]))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return Felt(self.field, int(self.field.sub_table[self.code, b]))

    def __rsub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return Felt(self.field, int(self.field.sub_table[b, self.code]))

    def __mul__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return Felt(self.field, int(self.field.mul_table[self.code, b]))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        if b == 0:
            raise ZeroDivisionError("division by zero in " + repr(self.field))
        return Felt(self.field, int(self.field.mul_table[self.code, self.field.inv_table[b]]))

    def __neg__(self):
        return Felt(self.field, int(self.field.neg_table[self.code]))

    def __pow__(self, k: int):
        # square-and-multiply; negative exponents go through the inverse
        if k < 0:
            return self.inverse() ** (-k)
        result, base = 1, self.code
        mul = self.field.mul_table
        while k:
            if k & 1:
                result = int(mul[result, base])
            base = int(mul[base, base])
            k >>= 1
        return Felt(self.field, result)

    def inverse(self) -> Felt:
        if self.code == 0:
            raise ZeroDivisionError("zero has no inverse")
        return Felt(self.field, int(self.field.inv_table[self.code]))

    def __bool__(self):
        return self.code != 0

    def __int__(self):
        return self.code

    def __repr__(self):
        return self.field.render(self.code)


_OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}


def arith(a: Felt, b: Felt | int | None, op: str) -> Felt:
    """Dispatch one field operation by name.

    ``op`` is one of add, sub, mul, div, neg, inv or pow; for pow, ``b`` is
    the integer exponent.
    """
    if op in _OPS:
        if isinstance(b, Felt) and b.field != a.field:
            raise FieldMismatchError(f"{a.field!r} vs {b.field!r}")
        return _OPS[op](a, b)
    if op == "neg":
        return -a
    if op == "inv":
        return a.inverse()
    if op == "pow":
        return a ** int(b)
    raise ValueError(f"unknown op {op!r}")


def frobenius(a: Felt) -> Felt:
    return Felt(a.field, int(a.field.frob_table[a.code]))


def projection_table(source: FieldSpec, target: FieldSpec) -> np.ndarray:
    """Code map GF(p^t) -> GF(p^e) keeping the first e coordinates."""
    if source.p != target.p or target.e >= source.e:
        raise DegreeMismatchError(
            f"cannot project {source!r} onto {target!r}: need equal p and e < t")
    return np.arange(source.q, dtype=np.int64) % target.q


def project(a: Felt, target: FieldSpec) -> Felt:
    """Map an element of GF(p^t) to GF(p^e), e < t, by coordinate truncation."""
    table = projection_table(a.field, target)
    return Felt(target, int(table[a.code]))


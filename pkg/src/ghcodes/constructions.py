"""GH matrix constructions with F_p-additive codes.

Every builder returns a normalized :class:`GHMatrix`.  Row orders are fixed
so that outputs can be compared byte for byte against stored fixtures:
field elements are listed in power order 0, 1, w, ..., w^(q-2), and tuples of
labels are enumerated lexicographically with the first entry most
significant.

Recipes (a small AST of the constructions) record how a matrix was made and
what (rank, kernel) it is declared to have.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from importlib import resources
from typing import Sequence

import numpy as np

from .finite_field import (FieldMismatchError, FieldSpec, default_poly, make_field,
                           power_sequence)
from .gh_matrix import GHMatrix, parse_ghm


class ConstructionError(ValueError):
    pass


class ParamRangeError(ConstructionError):
    pass


class SizeMismatchError(ConstructionError):
    pass


# ---------------------------------------------------------------------------
# building blocks

def symbol_vector(field: FieldSpec, n: int, i: int) -> np.ndarray:
    """v_i: the power-ordered symbols, each repeated q^(i-1) times, tiled to length n."""
    q = field.q
    order = field.power_order()
    return order[(np.arange(n) // q ** (i - 1)) % q]


def block_vector(field: FieldSpec, n: int, z: int, j: int) -> np.ndarray:
    """g_j^(z): the symbols of v_z on positions j*q^z .. (j+1)*q^z - 1, zero elsewhere."""
    q = field.q
    lo, hi = j * q**z, (j + 1) * q**z
    if j < 1 or hi > n:
        raise ParamRangeError(f"block ({z}, {j}) does not fit in length {n}")
    g = np.zeros(n, dtype=np.int64)
    g[lo:hi] = symbol_vector(field, hi - lo, z)
    return g


def f_span_rows(field: FieldSpec, gens: Sequence[np.ndarray], scalars: Sequence[int]) -> np.ndarray:
    """All combinations sum(c_i * gens[i]) with c_i drawn from ``scalars``.

    Rows are in lexicographic order of (c_1, ..., c_m), c_1 most significant.
    """
    add, mul = field.add_table, field.mul_table
    n = len(gens[0]) if gens else 0
    rows = np.zeros((1, n), dtype=np.int64)
    for g in reversed(gens):
        g = np.asarray(g, dtype=np.int64)
        rows = np.concatenate([add[mul[c, g][None, :], rows] for c in scalars])
    return rows


def multiplication_table(field: FieldSpec) -> GHMatrix:
    """S_q with rows and columns in power order."""
    order = field.power_order()
    return GHMatrix(field, field.mul_table[order[:, None], order[None, :]])


def kronecker_sum(H: GHMatrix, Bs: GHMatrix | Sequence[GHMatrix]) -> GHMatrix:
    """H (+) [B_1, ..., B_n]: block (i, j) is h_ij + B_i."""
    if isinstance(Bs, GHMatrix):
        Bs = [Bs]
    Bs = list(Bs)
    if len(Bs) == 1:
        Bs = Bs * H.n
    if len(Bs) != H.n:
        raise SizeMismatchError(f"need 1 or {H.n} inner matrices, got {len(Bs)}")
    m = Bs[0].n
    for B in Bs:
        if B.field != H.field:
            raise FieldMismatchError("Kronecker sum needs a common field")
        if B.n != m:
            raise SizeMismatchError("inner matrices must share one order")
    stack = np.stack([B.entries for B in Bs])  # (n, m, m)
    big = H.field.add_table[H.entries[:, None, :, None], stack[:, :, None, :]]
    n = H.n
    return GHMatrix(H.field, big.reshape(n * m, n * m))


# ---------------------------------------------------------------------------
# constructions

def sylvester(field: FieldSpec, h: int) -> GHMatrix:
    """S^h = S_q (+) S^(h-1), of order q^h."""
    if h < 1:
        raise ParamRangeError("h must be >= 1")
    S = multiplication_table(field)
    M = S
    for _ in range(h - 1):
        M = kronecker_sum(S, M)
    return M


@dataclass(frozen=True)
class SwitchingLayout:
    """Rows of a switched Sylvester matrix as translated cosets of K.

    K is spanned by v_{m+1}, ..., v_h.  The coset with labels
    (beta_1, ..., beta_m) is K + sum_z (beta_z v_z + sum_(j, g) coord_j(beta_z) g)
    where ``switches[z]`` lists the (coordinate index, vector) pairs for round z.
    """

    field: FieldSpec
    h: int
    switches: tuple[tuple[tuple[int, np.ndarray], ...], ...]

    @property
    def m(self) -> int:
        return len(self.switches)

    @property
    def n(self) -> int:
        return self.field.q ** self.h

    def kernel_rows(self) -> np.ndarray:
        F = self.field
        gens = [symbol_vector(F, self.n, i) for i in range(self.m + 1, self.h + 1)]
        return f_span_rows(F, gens, F.power_order())

    def shift(self, labels: Sequence[int]) -> np.ndarray:
        F = self.field
        add, mul = F.add_table, F.mul_table
        out = np.zeros(self.n, dtype=np.int64)
        for z, beta in enumerate(labels, start=1):
            out = add[out, mul[beta, symbol_vector(F, self.n, z)]]
            for j, g in self.switches[z - 1]:
                out = add[out, mul[int(F.coords[beta, j]), g]]
        return out

    def coset(self, labels: Sequence[int]) -> np.ndarray:
        return self.field.add_table[self.shift(labels)[None, :], self.kernel_rows()]

    def matrix(self) -> GHMatrix:
        F = self.field
        K = self.kernel_rows()
        blocks = []
        for labels in itertools.product(F.power_order().tolist(), repeat=self.m):
            blocks.append(F.add_table[self.shift(labels)[None, :], K])
        return GHMatrix(F, np.concatenate(blocks))


def switching_I_layout(p: int, e: int, poly=None) -> SwitchingLayout:
    if e <= 1:
        raise ParamRangeError("switching needs e > 1")
    F = make_field(p, e, poly)
    n = F.q**2
    g = block_vector(F, n, 1, F.q - 1)  # the last q positions
    return SwitchingLayout(F, 2, (((e - 1, g),),))


def switching_I(p: int, e: int, poly=None) -> GHMatrix:
    """Order q^2, kernel 2 and rank 4: switch on the last coordinate of beta."""
    return switching_I_layout(p, e, poly).matrix()


def switching_III_layout(p: int, e: int, h: int, s_list: Sequence[int], poly=None) -> SwitchingLayout:
    if e <= 1:
        raise ParamRangeError("switching needs e > 1")
    if h <= 1:
        raise ParamRangeError("switching needs h > 1")
    s_list = list(s_list)
    if not 1 <= len(s_list) <= h - 1:
        raise ParamRangeError(f"need 1..{h - 1} switching rounds, got {len(s_list)}")
    if any(not 1 <= s <= e - 1 for s in s_list):
        raise ParamRangeError(f"each s must lie in 1..{e - 1}")
    F = make_field(p, e, poly)
    n = F.q**h
    switches = tuple(
        tuple((j, block_vector(F, n, z, j)) for j in range(1, s + 1))
        for z, s in enumerate(s_list, start=1)
    )
    return SwitchingLayout(F, h, switches)


def switching_III(p: int, e: int, h: int, s_list: Sequence[int], poly=None) -> GHMatrix:
    """Kernel h - m + 1 and rank h + 1 + sum(s_list), m = len(s_list)."""
    return switching_III_layout(p, e, h, s_list, poly).matrix()


def switching_II(p: int, e: int, h: int, s: int, poly=None) -> GHMatrix:
    """Kernel h and rank h + s + 1 (one switching round)."""
    return switching_III(p, e, h, [s], poly)


def projection_construction(p: int, e: int, t: int, source_poly=None, target_poly=None) -> GHMatrix:
    """Truncate the entries of S_{p^t} to GF(p^e): order p^t, kernel 1, rank t + 1."""
    if not t > e > 1:
        raise ParamRangeError(f"projection needs t > e > 1, got t={t}, e={e}")
    target = make_field(p, e, target_poly)
    source_poly = tuple(source_poly) if source_poly is not None else default_poly(p, t)
    seq = power_sequence(p, t, source_poly)
    if seq is None:
        raise ConstructionError(f"source relation {list(source_poly)} is not primitive")
    n = p**t
    exp = np.array(seq, dtype=np.int64)
    idx = np.arange(n - 1)
    body = exp[(idx[:, None] + idx[None, :]) % (n - 1)]
    full = np.zeros((n, n), dtype=np.int64)
    full[1:, 1:] = body
    # projected codes are the source codes mod p^e
    return GHMatrix(target, full % target.q)


def gh_p2_vectors(field: FieldSpec) -> tuple[np.ndarray, np.ndarray]:
    """v_1 = (0, w^0, ..., w^(q-2)) and v_2 with w^(ip) in position i + 1."""
    q, p = field.q, field.p
    v1 = field.power_order()
    v2 = np.concatenate([[0], field.exp[(np.arange(1, q) * p) % (q - 1)]])
    return v1, v2


def gh_p2_one(p: int, poly=None) -> GHMatrix:
    """H(p^2, 1) with kernel 1 and rank 3 for odd p."""
    if p == 2:
        raise ParamRangeError("no such matrix for p = 2: the only H(4,1) is linear")
    F = make_field(p, 2, poly)
    v1, v2 = gh_p2_vectors(F)
    return GHMatrix(F, f_span_rows(F, [v1, v2], range(p)))


# poly choices: the paper leaves w unspecified; GF(5^4) needs a w for which
# the displayed technique gives a GH matrix (the default relation does not).
FIXED_POLYS = {"H81_3": (1, 1, 0, 0), "H81_5": (3, 1, 1, 0)}
_FIXED_V2 = {"H81_3": (3, 2, 9), "H81_5": (5, 6, 25)}  # p, offset, step


def _fixed_p4(ident: str) -> GHMatrix:
    p, off, step = _FIXED_V2[ident]
    F = make_field(p, 4, FIXED_POLYS[ident])
    q = F.q
    v1 = F.power_order()
    v2 = np.concatenate([[0], F.exp[(off + step * np.arange(q - 1)) % (q - 1)]])
    w = F.w.code
    gens = [v1, F.mul_table[w, v1], v2, F.mul_table[w, v2]]
    return GHMatrix(F, f_span_rows(F, gens, range(p)))


def fixture_text(name: str) -> str:
    return resources.files("ghcodes").joinpath("data", f"{name}.ghm").read_text(encoding="utf-8")


def fixed_example(ident: str) -> GHMatrix:
    if ident == "H8_rank4":
        return parse_ghm(fixture_text("H8_rank4"))
    if ident in _FIXED_V2:
        return _fixed_p4(ident)
    raise ConstructionError(f"unknown fixed example {ident!r}")


# ---------------------------------------------------------------------------
# recipes

@dataclass(frozen=True)
class Declared:
    p: int
    e: int
    t: int
    rank: int
    ker: int


class Recipe:
    cost: int = 0

    def build(self) -> GHMatrix:
        raise NotImplementedError

    def declared(self) -> Declared:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    def sort_key(self):
        return (self.cost, str(self))


@dataclass(frozen=True)
class Sylvester(Recipe):
    p: int
    e: int
    h: int
    cost = 0

    def build(self):
        return sylvester(make_field(self.p, self.e), self.h)

    def declared(self):
        return Declared(self.p, self.e, self.e * self.h, 1 + self.h, 1 + self.h)

    def to_json(self):
        return {"kind": "sylvester", "p": self.p, "e": self.e, "h": self.h}

    def __str__(self):
        return f"Sylvester(q={self.p ** self.e},h={self.h})"


@dataclass(frozen=True)
class Projection(Recipe):
    p: int
    e: int
    t: int
    cost = 1

    def __post_init__(self):
        if not self.t > self.e > 1:
            raise ParamRangeError("projection needs t > e > 1")

    def build(self):
        return projection_construction(self.p, self.e, self.t)

    def declared(self):
        return Declared(self.p, self.e, self.t, self.t + 1, 1)

    def to_json(self):
        return {"kind": "projection", "p": self.p, "e": self.e, "t": self.t}

    def __str__(self):
        return f"Projection(p={self.p},e={self.e},t={self.t})"


@dataclass(frozen=True)
class GHp2(Recipe):
    p: int
    cost = 1

    def __post_init__(self):
        if self.p == 2:
            raise ParamRangeError("GHp2 needs an odd prime")

    def build(self):
        return gh_p2_one(self.p)

    def declared(self):
        return Declared(self.p, 2, 2, 3, 1)

    def to_json(self):
        return {"kind": "ghp2", "p": self.p}

    def __str__(self):
        return f"GHp2(p={self.p})"


FIXED_DECLARED = {
    "H8_rank4": Declared(2, 3, 3, 4, 1),
    "H81_3": Declared(3, 4, 4, 3, 1),
    "H81_5": Declared(5, 4, 4, 3, 1),
}


@dataclass(frozen=True)
class Fixed(Recipe):
    ident: str
    cost = 1

    def __post_init__(self):
        if self.ident not in FIXED_DECLARED:
            raise ConstructionError(f"unknown fixed example {self.ident!r}")

    def build(self):
        return fixed_example(self.ident)

    def declared(self):
        return FIXED_DECLARED[self.ident]

    def to_json(self):
        return {"kind": "fixed", "id": self.ident}

    def __str__(self):
        return f"Fixed({self.ident})"


@dataclass(frozen=True)
class SwitchI(Recipe):
    p: int
    e: int
    cost = 2

    def __post_init__(self):
        if self.e <= 1:
            raise ParamRangeError("switching needs e > 1")

    def build(self):
        return switching_I(self.p, self.e)

    def declared(self):
        return Declared(self.p, self.e, 2 * self.e, 4, 2)

    def to_json(self):
        return {"kind": "switching1", "p": self.p, "e": self.e}

    def __str__(self):
        return f"SwitchI(p={self.p},e={self.e})"


@dataclass(frozen=True)
class SwitchII(Recipe):
    p: int
    e: int
    h: int
    s: int
    cost = 2

    def __post_init__(self):
        if not (self.e > 1 and self.h > 1 and 1 <= self.s <= self.e - 1):
            raise ParamRangeError("SwitchII needs e > 1, h > 1, 1 <= s <= e-1")

    def build(self):
        return switching_II(self.p, self.e, self.h, self.s)

    def declared(self):
        return Declared(self.p, self.e, self.h * self.e, self.h + self.s + 1, self.h)

    def to_json(self):
        return {"kind": "switching2", "p": self.p, "e": self.e, "h": self.h, "s": self.s}

    def __str__(self):
        return f"SwitchII(p={self.p},e={self.e},h={self.h},s={self.s})"


@dataclass(frozen=True)
class SwitchIII(Recipe):
    p: int
    e: int
    h: int
    s: tuple[int, ...]
    cost = 2

    def __post_init__(self):
        object.__setattr__(self, "s", tuple(self.s))
        if not (self.e > 1 and self.h > 1 and 1 <= len(self.s) <= self.h - 1
                and all(1 <= s <= self.e - 1 for s in self.s)):
            raise ParamRangeError("SwitchIII needs e > 1, h > 1, 1..h-1 rounds with s in 1..e-1")

    def build(self):
        return switching_III(self.p, self.e, self.h, self.s)

    def declared(self):
        m = len(self.s)
        return Declared(self.p, self.e, self.h * self.e, self.h + 1 + sum(self.s), self.h - m + 1)

    def to_json(self):
        return {"kind": "switching3", "p": self.p, "e": self.e, "h": self.h, "s": list(self.s)}

    def __str__(self):
        return f"SwitchIII(p={self.p},e={self.e},h={self.h},s={list(self.s)})"


@dataclass(frozen=True)
class Kron(Recipe):
    left: Recipe
    right: Recipe
    cost = 3

    def __post_init__(self):
        a, b = self.left.declared(), self.right.declared()
        if (a.p, a.e) != (b.p, b.e):
            raise FieldMismatchError("Kronecker factors over different fields")

    def build(self):
        return kronecker_sum(self.left.build(), self.right.build())

    def declared(self):
        a, b = self.left.declared(), self.right.declared()
        return Declared(a.p, a.e, a.t + b.t, a.rank + b.rank - 1, a.ker + b.ker - 1)

    def to_json(self):
        return {"kind": "kron", "left": self.left.to_json(), "right": self.right.to_json()}

    def __str__(self):
        return f"Kron({self.left},{self.right})"


def recipe_from_json(obj: dict) -> Recipe:
    kind = obj["kind"]
    if kind == "sylvester":
        return Sylvester(obj["p"], obj["e"], obj["h"])
    if kind == "projection":
        return Projection(obj["p"], obj["e"], obj["t"])
    if kind == "ghp2":
        return GHp2(obj["p"])
    if kind == "fixed":
        return Fixed(obj["id"])
    if kind == "switching1":
        return SwitchI(obj["p"], obj["e"])
    if kind == "switching2":
        return SwitchII(obj["p"], obj["e"], obj["h"], obj["s"])
    if kind == "switching3":
        return SwitchIII(obj["p"], obj["e"], obj["h"], tuple(obj["s"]))
    if kind == "kron":
        return Kron(recipe_from_json(obj["left"]), recipe_from_json(obj["right"]))
    raise ConstructionError(f"unknown recipe kind {kind!r}")


def kron_chain(parts: Sequence[Recipe]) -> Recipe:
    """parts[0] (+) (parts[1] (+) (... (+) parts[-1]))."""
    out = parts[-1]
    for r in reversed(parts[:-1]):
        out = Kron(r, out)
    return out

"""Generalised Hadamard matrices, their codes F_H and C_H, and the .ghm format.

Matrices and codewords are numpy arrays of integer element codes (see
:mod:`ghcodes.finite_field`).  A GH matrix H(q, lambda) of order n = q*lambda
has, for every pair of rows, a difference vector containing each field
element exactly lambda times.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .finite_field import FieldError, FieldMismatchError, FieldSpec, make_field


class GHError(ValueError):
    pass


class OrderNotMultipleOfQError(GHError):
    pass


class NotGHError(GHError):
    pass


class NotNormalizedError(GHError):
    pass


class GHMFormatError(GHError):
    pass


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GHMatrix:
    """An n x n table of element codes over ``field`` with q | n.

    The GH difference property is not checked on construction; use
    :func:`verify_gh`.
    """

    field: FieldSpec
    entries: np.ndarray

    def __post_init__(self):
        arr = _frozen(self.entries)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise GHError(f"matrix must be square, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= self.field.q):
            raise FieldError("entry codes out of range")
        if arr.shape[0] % self.field.q:
            raise OrderNotMultipleOfQError(f"order {arr.shape[0]} is not a multiple of q={self.field.q}")
        object.__setattr__(self, "entries", arr)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def lam(self) -> int:
        return self.n // self.field.q

    @property
    def is_normalized(self) -> bool:
        return not self.entries[0].any() and not self.entries[:, 0].any()

    def __eq__(self, other):
        return (isinstance(other, GHMatrix) and self.field == other.field
                and np.array_equal(self.entries, other.entries))

    def __hash__(self):
        return hash((self.field, self.entries.tobytes()))

    def __repr__(self):
        return f"GHMatrix(q={self.field.q}, lambda={self.lam}, n={self.n})"

    def power_text(self) -> str:
        return "\n".join(" ".join(self.field.render(c) for c in row) for row in self.entries)


@dataclass(frozen=True)
class GHReport:
    ok: bool
    # (i, j, element code, count) of the first non-uniform difference multiset
    violation: tuple[int, int, int, int] | None = None

    def __bool__(self):
        return self.ok


def _difference_counts(field: FieldSpec, entries: np.ndarray, i: int) -> np.ndarray:
    """Counts of each element in row_i - row_j for all j > i, shape (n-i-1, q)."""
    q = field.q
    diffs = field.sub_table[entries[i][None, :], entries[i + 1:]]
    m = diffs.shape[0]
    flat = diffs + q * np.arange(m)[:, None]
    return np.bincount(flat.ravel(), minlength=m * q).reshape(m, q)


def verify_gh(M: GHMatrix | np.ndarray, field: FieldSpec | None = None) -> GHReport:
    """Check the GH difference property row pair by row pair."""
    if isinstance(M, GHMatrix):
        field, entries = M.field, M.entries
    else:
        if field is None:
            raise TypeError("a raw array needs its field")
        entries = np.asarray(M, dtype=np.int64)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise GHError(f"matrix must be square, got shape {entries.shape}")
    n = entries.shape[0]
    if n % field.q:
        raise OrderNotMultipleOfQError(f"order {n} is not a multiple of q={field.q}")
    lam = n // field.q
    for i in range(n - 1):
        counts = _difference_counts(field, entries, i)
        bad = np.nonzero(np.any(counts != lam, axis=1))[0]
        if bad.size:
            r = int(bad[0])
            elem = int(np.nonzero(counts[r] != lam)[0][0])
            return GHReport(False, (i, i + 1 + r, elem, int(counts[r, elem])))
    return GHReport(True)


def normalize(M: GHMatrix) -> GHMatrix:
    """Zero the first row and column: columns first, then rows."""
    if not verify_gh(M):
        raise NotGHError("normalize needs a GH matrix")
    sub = M.field.sub_table
    cols_done = sub[M.entries, M.entries[0][None, :]]
    rows_done = sub[cols_done, cols_done[:, 0][:, None]]
    return GHMatrix(M.field, rows_done)


@dataclass(frozen=True)
class RowPerm:
    perm: Sequence[int]


@dataclass(frozen=True)
class ColPerm:
    perm: Sequence[int]


@dataclass(frozen=True)
class AddToRow:
    index: int
    element: int


@dataclass(frozen=True)
class AddToCol:
    index: int
    element: int


Transform = RowPerm | ColPerm | AddToRow | AddToCol


def _check_perm(perm, n):
    perm = np.asarray(perm, dtype=np.int64)
    if perm.shape != (n,) or not np.array_equal(np.sort(perm), np.arange(n)):
        raise IndexError(f"not a permutation of range({n})")
    return perm


def apply_equivalence(M: GHMatrix, transform: Transform) -> GHMatrix:
    """Apply one of the four GH-preserving equivalence moves.

    A permutation ``perm`` sends new position k to old position perm[k].
    """
    n, F = M.n, M.field
    out = M.entries.copy()
    if isinstance(transform, RowPerm):
        out = out[_check_perm(transform.perm, n)]
    elif isinstance(transform, ColPerm):
        out = out[:, _check_perm(transform.perm, n)]
    elif isinstance(transform, (AddToRow, AddToCol)):
        if not 0 <= transform.index < n:
            raise IndexError(f"index {transform.index} out of range for order {n}")
        a = int(transform.element)
        if not 0 <= a < F.q:
            raise FieldError(f"element code {a} out of range")
        if isinstance(transform, AddToRow):
            out[transform.index] = F.add_table[out[transform.index], a]
        else:
            out[:, transform.index] = F.add_table[out[:, transform.index], a]
    else:
        raise TypeError(f"unknown transform {transform!r}")
    return GHMatrix(F, out)


def transpose(M: GHMatrix) -> GHMatrix:
    return GHMatrix(M.field, M.entries.T)


# ---------------------------------------------------------------------------
# codes

_HASH_RNG_SEED = 0x5EED


class WordIndex:
    """Exact membership for a set of words.

    Words are bucketed by a random linear 64-bit hash; a hash hit is confirmed
    by comparing the stored row, so lookups never give false positives.
    """

    def __init__(self, words: np.ndarray):
        self.words = words
        n = words.shape[1]
        rng = np.random.default_rng(_HASH_RNG_SEED + n)
        self._mult = rng.integers(1, 2**63, size=n, dtype=np.uint64) * np.uint64(2) + np.uint64(1)
        h = self._hash(words)
        order = np.argsort(h, kind="stable")
        self._sorted = h[order]
        self._order = order
        if self._sorted.size > 1 and np.any(self._sorted[1:] == self._sorted[:-1]):
            # astronomically unlikely; keep exactness with a slow fallback
            self._fallback = {w.tobytes() for w in words}
        else:
            self._fallback = None

    def _hash(self, batch: np.ndarray) -> np.ndarray:
        return batch.astype(np.uint64) @ self._mult

    def contains(self, batch: np.ndarray) -> np.ndarray:
        batch = np.asarray(batch, dtype=np.int64)
        if batch.ndim == 1:
            batch = batch[None, :]
        if self._fallback is not None:
            return np.array([b.tobytes() in self._fallback for b in batch], dtype=bool)
        if len(self._sorted) == 0:
            return np.zeros(len(batch), dtype=bool)
        h = self._hash(batch)
        pos = np.minimum(np.searchsorted(self._sorted, h), len(self._sorted) - 1)
        hit = self._sorted[pos] == h
        cand = self.words[self._order[pos]]
        return hit & np.all(cand == batch, axis=1)


class Code:
    """A set of length-n words over a field, kept in lexicographic order."""

    def __init__(self, field: FieldSpec, words: np.ndarray | Iterable[Sequence[int]], length: int | None = None):
        arr = np.asarray(words if isinstance(words, np.ndarray) else list(words), dtype=np.int64)
        if arr.ndim == 1:
            if length is None:
                raise GHError("empty word list needs an explicit length")
            arr = arr.reshape(-1, length)
        if length is not None and arr.shape[1] != length:
            raise GHError(f"word length {arr.shape[1]} != {length}")
        if arr.size and (arr.min() < 0 or arr.max() >= field.q):
            raise FieldError("word entries out of range")
        arr = np.unique(arr, axis=0) if len(arr) else arr
        arr.setflags(write=False)
        self.field = field
        self.words = arr
        self.length = arr.shape[1]
        self._index: WordIndex | None = None
        self.flags: dict[str, bool] = {}

    @property
    def index(self) -> WordIndex:
        if self._index is None:
            self._index = WordIndex(self.words)
        return self._index

    def __len__(self):
        return len(self.words)

    def __contains__(self, word) -> bool:
        return bool(self.index.contains(np.asarray(word, dtype=np.int64))[0])

    def contains_many(self, batch: np.ndarray) -> np.ndarray:
        return self.index.contains(batch)

    @property
    def contains_zero(self) -> bool:
        return np.zeros(self.length, dtype=np.int64) in self

    def __eq__(self, other):
        return (isinstance(other, Code) and self.field == other.field
                and self.words.shape == other.words.shape
                and np.array_equal(self.words, other.words))

    def __hash__(self):
        return hash((self.field, self.words.tobytes()))

    def issubset(self, other: Code) -> bool:
        if self.field != other.field:
            raise FieldMismatchError("codes over different fields")
        return bool(np.all(other.contains_many(self.words))) if len(self) else True

    def __repr__(self):
        return f"Code(q={self.field.q}, n={self.length}, size={len(self)})"


def extract_codes(M: GHMatrix) -> tuple[Code, Code]:
    """F_H (the rows) and C_H (all translates of F_H by constant vectors)."""
    if not M.is_normalized:
        raise NotNormalizedError("rank/kernel relations need a normalized matrix")
    F = M.field
    rows = M.entries
    shifted = F.add_table[rows[None, :, :], np.arange(F.q)[:, None, None]]
    return Code(F, rows), Code(F, shifted.reshape(-1, M.n))


# ---------------------------------------------------------------------------
# .ghm text format

def format_ghm(M: GHMatrix, comments: Sequence[str] = ()) -> str:
    F = M.field
    out = io.StringIO()
    for c in comments:
        out.write(f"# {c}\n")
    out.write("GHM 1\n")
    out.write(f"field p={F.p} e={F.e} poly={','.join(str(c) for c in F.poly)}\n")
    out.write(f"order n={M.n}\n")
    for row in M.entries:
        out.write(" ".join(str(int(c)) for c in row) + "\n")
    return out.getvalue()


def _kv(token: str, key: str) -> str:
    if not token.startswith(key + "="):
        raise GHMFormatError(f"expected {key}=..., got {token!r}")
    return token[len(key) + 1:]


def parse_ghm(text: str) -> GHMatrix:
    lines = [ln for ln in text.split("\n") if not ln.startswith("#")]
    while lines and lines[-1] == "":
        lines.pop()
    if len(lines) < 3 or lines[0] != "GHM 1":
        raise GHMFormatError("missing 'GHM 1' header")
    head = lines[1].split(" ")
    if len(head) != 4 or head[0] != "field":
        raise GHMFormatError(f"bad field line {lines[1]!r}")
    try:
        p = int(_kv(head[1], "p"))
        e = int(_kv(head[2], "e"))
        poly_s = _kv(head[3], "poly")
        poly = [int(c) for c in poly_s.split(",")] if poly_s else None
        order = lines[2].split(" ")
        if len(order) != 2 or order[0] != "order":
            raise GHMFormatError(f"bad order line {lines[2]!r}")
        n = int(_kv(order[1], "n"))
        rows = [[int(c) for c in ln.split(" ")] for ln in lines[3:]]
    except ValueError as exc:
        if isinstance(exc, GHError):
            raise
        raise GHMFormatError(str(exc)) from exc
    if len(rows) != n or any(len(r) != n for r in rows):
        raise GHMFormatError(f"expected {n} rows of {n} entries")
    big = p**e > 5**4
    field = make_field(p, e, poly, allow_large=big)
    return GHMatrix(field, np.array(rows, dtype=np.int64).reshape(n, n))


def write_ghm(M: GHMatrix, path: str | os.PathLike, comments: Sequence[str] = ()) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_ghm(M, comments))


def read_ghm(path: str | os.PathLike) -> GHMatrix:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_ghm(fh.read())

"""Rank, kernel, p-rank and p-kernel of codes over GF(p^e).

Dimensions over the prime field are reported in q-units as exact
:class:`QDimension` values (F_p-dimension over e), so a code with 2^5 words
over GF(4) has dimension 5/2.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .finite_field import FieldSpec
from .gh_matrix import Code, GHMatrix, extract_codes


class ZeroNotInCodeError(ValueError):
    pass


class InvariantRelationError(AssertionError):
    """A relation that must hold for every normalized GH matrix failed."""


class CodeTooLargeError(RuntimeError):
    """The code would exceed the cell budget for materialized measurement."""


DEFAULT_MAX_CELLS = 10**8


def max_cells() -> int:
    """Cell budget |C_H| * n for measured invariants (env GHC_MAX_CELLS)."""
    return int(float(os.environ.get("GHC_MAX_CELLS", DEFAULT_MAX_CELLS)))


def code_cells(M: GHMatrix) -> int:
    return M.field.q * M.n * M.n


@dataclass(frozen=True, order=True)
class QDimension:
    num: int
    den: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.num, self.den)

    def __str__(self):
        v = self.value
        if v.denominator == 1:
            return str(v.numerator)
        if v.denominator == 2:
            return f"{float(v):g}"
        return f"{v.numerator}/{v.denominator}"

    def to_json(self):
        return [self.num, self.den]


# ---------------------------------------------------------------------------
# echelon bases

def fq_basis(field: FieldSpec, words: np.ndarray) -> np.ndarray:
    """Echelon basis of the F_q-span of ``words``.

    Words are scanned in the given order; each new pivot is the first nonzero
    coordinate of the first word not yet in the span, scaled to 1.
    """
    add, mul, inv, neg = field.add_table, field.mul_table, field.inv_table, field.neg_table
    W = np.array(words, dtype=np.int64)
    W = W[W.any(axis=1)]
    basis = []
    while len(W):
        row = W[0]
        c = int(np.argmax(row != 0))
        b = mul[inv[row[c]], row]
        basis.append(b)
        # w <- w - w[c] * b
        W = add[W, mul[neg[W[:, c]][:, None], b[None, :]]]
        W = W[W.any(axis=1)]
    n = np.asarray(words).shape[1]
    return np.array(basis, dtype=np.int64).reshape(-1, n)


def expand(field: FieldSpec, words: np.ndarray) -> np.ndarray:
    """Words as F_p vectors of length n*e (coordinate-major within a position)."""
    W = np.asarray(words, dtype=np.int64)
    return field.coords[W].reshape(len(W), -1)


def collapse(field: FieldSpec, vectors: np.ndarray) -> np.ndarray:
    V = np.asarray(vectors, dtype=np.int64).reshape(len(vectors), -1, field.e)
    return V @ (field.p ** np.arange(field.e, dtype=np.int64))


def fp_basis_vectors(p: int, vectors: np.ndarray) -> np.ndarray:
    """Echelon basis over F_p of integer vectors (entries in [0, p))."""
    dtype = np.int16 if p < 128 else np.int64
    V = np.array(vectors, dtype=dtype) % p
    V = V[V.any(axis=1)]
    inv = [0] + [pow(a, p - 2, p) for a in range(1, p)]
    basis = []
    while len(V):
        row = V[0]
        c = int(np.argmax(row != 0))
        b = (row * inv[int(row[c])]) % p
        basis.append(b.astype(np.int64))
        V = (V - V[:, c:c + 1] * b[None, :]) % p
        V = V[V.any(axis=1)]
    return np.array(basis, dtype=np.int64).reshape(-1, np.asarray(vectors).shape[1])


def fp_generators(C: Code) -> np.ndarray:
    """Words forming an F_p-basis of the additive span of C."""
    F = C.field
    return collapse(F, fp_basis_vectors(F.p, expand(F, C.words)))


# ---------------------------------------------------------------------------
# rank

def rank_q(C: Code) -> int:
    return len(fq_basis(C.field, C.words))


def rank_p(C: Code) -> QDimension:
    F = C.field
    return QDimension(len(fp_basis_vectors(F.p, expand(F, C.words))), F.e)


def _require_zero(C: Code):
    if not C.contains_zero:
        raise ZeroNotInCodeError("kernel needs the all-zero word in the code")


def classify(C: Code) -> dict[str, bool]:
    """Additivity and linearity flags.

    C is F_p-additive iff it equals its F_p-span, i.e. |C| = p^rank_p; the
    same count against q^rank_q decides F_q-linearity.
    """
    _require_zero(C)
    if "is_p_additive" not in C.flags:
        F = C.field
        additive = len(C) == F.p ** rank_p(C).num
        linear = additive and len(C) == F.q ** rank_q(C)
        C.flags["is_p_additive"] = additive
        C.flags["is_q_linear"] = linear
    return {"is_p_additive": C.flags["is_p_additive"], "is_q_linear": C.flags["is_q_linear"]}


def is_closed_under_addition(C: Code) -> bool:
    """Pairwise closure check; quadratic, used as an oracle on small codes."""
    add = C.field.add_table
    W = C.words
    for w in W:
        if not np.all(C.contains_many(add[w[None, :], W])):
            return False
    return True


# ---------------------------------------------------------------------------
# kernels

def _log_size(size: int, base: int) -> int:
    k, s = 0, 1
    while s < size:
        s *= base
        k += 1
    if s != size:
        raise InvariantRelationError(f"{size} is not a power of {base}")
    return k


def _coset_stable(C: Code, shifts: np.ndarray) -> bool:
    """shift + C is a subset of C (hence equal) for every shift in ``shifts``."""
    add = C.field.add_table
    W = C.words
    for s in shifts:
        if not np.all(C.contains_many(add[s[None, :], W])):
            return False
    return True


def kernel_q_coset(C: Code) -> Code:
    """K(C) straight from the definition: alpha*x + C = C for all alpha."""
    _require_zero(C)
    F = C.field
    keep = []
    for x in C.words:
        shifts = F.mul_table[np.arange(1, F.q)[:, None], x[None, :]]
        if _coset_stable(C, shifts):
            keep.append(x)
    return Code(F, np.array(keep, dtype=np.int64).reshape(-1, C.length), C.length)


def kernel_q_lemma(C: Code) -> Code:
    """K(C) for an F_p-additive C: x is in K(C) iff mu*x in C for all mu.

    For additive C the set of good multipliers is itself F_p-closed, so only
    mu in the F_p-basis {w, ..., w^(e-1)} of F_q must be tested.
    """
    _require_zero(C)
    F = C.field
    W = C.words
    mask = np.ones(len(W), dtype=bool)
    for i in range(1, F.e):
        mu = F.p**i
        mask &= C.contains_many(F.mul_table[mu, W])
    return Code(F, W[mask], C.length)


def kernel_q(C: Code, method: str = "auto") -> Code:
    if method == "auto":
        method = "lemma" if classify(C)["is_p_additive"] else "coset"
    if method == "lemma":
        if not classify(C)["is_p_additive"]:
            raise ValueError("the multiplier test is only valid for additive codes")
        return kernel_q_lemma(C)
    if method == "coset":
        return kernel_q_coset(C)
    raise ValueError(f"unknown method {method!r}")


def kernel_p_coset(C: Code) -> Code:
    _require_zero(C)
    keep = [x for x in C.words if _coset_stable(C, x[None, :])]
    return Code(C.field, np.array(keep, dtype=np.int64).reshape(-1, C.length), C.length)


def kernel_p(C: Code, method: str = "auto") -> Code:
    _require_zero(C)
    if method == "auto":
        method = "additive" if classify(C)["is_p_additive"] else "coset"
    if method == "additive":
        return C
    if method == "coset":
        return kernel_p_coset(C)
    raise ValueError(f"unknown method {method!r}")


def ker_q(C: Code, method: str = "auto") -> int:
    return _log_size(len(kernel_q(C, method)), C.field.q)


def ker_p(C: Code, method: str = "auto") -> QDimension:
    return QDimension(_log_size(len(kernel_p(C, method)), C.field.p), C.field.e)


# ---------------------------------------------------------------------------
# reports

@dataclass(frozen=True)
class CodeInvariants:
    rank_q: int
    ker_q: int
    rank_p: QDimension
    ker_p: QDimension

    def to_json(self):
        return {"rank_q": self.rank_q, "ker_q": self.ker_q,
                "rank_p": self.rank_p.to_json(), "ker_p": self.ker_p.to_json()}


def code_invariants(C: Code) -> CodeInvariants:
    return CodeInvariants(rank_q(C), ker_q(C), rank_p(C), ker_p(C))


@dataclass(frozen=True)
class InvariantReport:
    p: int
    e: int
    n: int
    lam: int
    F_H: CodeInvariants
    C_H: CodeInvariants
    is_p_additive: bool
    is_q_linear: bool

    @property
    def rank(self) -> int:
        return self.C_H.rank_q

    @property
    def ker(self) -> int:
        return self.C_H.ker_q

    @property
    def t(self) -> int | None:
        """Exponent with n = p^t, or None when n is not a power of p."""
        try:
            return _log_size(self.n, self.p)
        except InvariantRelationError:
            return None

    def to_json(self):
        return {
            "matrix": {"p": self.p, "e": self.e, "n": self.n, "lambda": self.lam},
            "F_H": self.F_H.to_json(),
            "C_H": self.C_H.to_json(),
            "is_p_additive": self.is_p_additive,
            "is_q_linear": self.is_q_linear,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=False)


def invariant_report(M: GHMatrix, budget: int | None = None) -> InvariantReport:
    budget = max_cells() if budget is None else budget
    if code_cells(M) > budget:
        raise CodeTooLargeError(
            f"|C_H| * n = {code_cells(M)} exceeds the budget {budget} (GHC_MAX_CELLS)")
    F_H, C_H = extract_codes(M)
    f_inv = code_invariants(F_H)
    c_inv = code_invariants(C_H)
    flags = classify(C_H)
    if c_inv.rank_q != f_inv.rank_q + 1 or c_inv.ker_q != f_inv.ker_q + 1:
        raise InvariantRelationError(
            f"F_H -> C_H relation broken: F_H {f_inv}, C_H {c_inv}")
    F = M.field
    for inv in (f_inv, c_inv):
        if F.e * inv.rank_q < inv.rank_p.num or inv.ker_q > inv.rank_q:
            raise InvariantRelationError(f"inconsistent dimensions {inv}")
    return InvariantReport(F.p, F.e, M.n, M.lam, f_inv, c_inv,
                           flags["is_p_additive"], flags["is_q_linear"])


def bound_violations(report: InvariantReport) -> list[str]:
    """Which of the additive-code bounds a measured report breaks (empty if none).

    Covers: ker >= 1; additivity <=> rank_p = ker_p = 1 + t/e; the rank window
    for the measured kernel; the kernel range; and r + k = t + 2 when e = 2.
    """
    out = []
    p, e = report.p, report.e
    c = report.C_H
    r, k = c.rank_q, c.ker_q
    if k < 1:
        out.append(f"ker {k} < 1")
    if c.ker_q * e > c.ker_p.num:
        out.append("ker exceeds p-kernel")
    if not report.is_p_additive:
        return out
    t = report.t
    if t is None:
        out.append(f"additive code of length {report.n} which is not a power of p")
        return out
    one_plus = Fraction(e + t, e)
    if c.rank_p.value != one_plus or c.ker_p.value != one_plus:
        out.append(f"rank_p/ker_p {c.rank_p}/{c.ker_p} != 1 + t/e = {one_plus}")
    if e == 1:
        return out
    if report.is_q_linear:
        if not (t % e == 0 and r == k == 1 + t // e):
            out.append(f"linear code with (r, k) = ({r}, {k}), t = {t}")
    else:
        if not 1 <= k <= t // e:
            out.append(f"nonlinear kernel {k} outside 1..{t // e}")
        lo = -(-(e + t - k) // (e - 1))
        hi = 1 + t - (e - 1) * (k - 1)
        if not lo <= r <= hi:
            out.append(f"rank {r} outside [{lo}, {hi}] for k = {k}")
    if e == 2 and r + k != t + 2:
        out.append(f"e = 2 but r + k = {r + k} != t + 2 = {t + 2}")
    return out

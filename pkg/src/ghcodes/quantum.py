"""Additive inner products over GF(p^2), self-orthogonality and quantum code parameters.

The additive (trace Hermitian) product of v and w is

    sum_i (v_i w_i^p - v_i^p w_i)            for p = 2,
    beta * sum_i (v_i w_i^p - v_i^p w_i)     for odd p, beta = w^((p+1)/2),

and always lands in F_p.  Coordinatewise it is a lookup in a q x q table
``T`` with entries in F_p, which makes every scan below a table gather.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .finite_field import Felt, FieldSpec
from .gh_matrix import Code, GHMatrix, extract_codes
from .invariants import classify, fp_generators


class QuantumError(ValueError):
    pass


class DegreeNotTwoError(QuantumError):
    pass


class NotAdditiveError(QuantumError):
    pass


class BudgetExceededError(QuantumError):
    pass


class PreconditionFailedError(QuantumError):
    pass


SCAN_MAX_LENGTH = 700


def _need_degree_two(field: FieldSpec):
    if field.e != 2:
        raise DegreeNotTwoError(f"inner products are defined over GF(p^2), got e={field.e}")


def beta(field: FieldSpec) -> int:
    """Scaling constant: 1 for p = 2, w^((p+1)/2) otherwise."""
    _need_degree_two(field)
    if field.p == 2:
        return 1
    b = int(field.exp[(field.p + 1) // 2])
    # b^p = -b, so (b * x) lies in F_p whenever x^p = -x
    assert field.mul_table[field.frob_table[b], 1] == field.neg_table[b]
    return b


@lru_cache(maxsize=None)
def _pair_table(field: FieldSpec) -> np.ndarray:
    """T[a, c] = beta (a c^p - a^p c) as an integer in [0, p)."""
    _need_degree_two(field)
    q = field.q
    a = np.arange(q)[:, None]
    c = np.arange(q)[None, :]
    fr = field.frob_table
    diff = field.sub_table[field.mul_table[a, fr[c]], field.mul_table[fr[a], c]]
    T = field.mul_table[beta(field), diff]
    if T.max() >= field.p:
        raise AssertionError("additive inner product left the prime field")
    T = np.ascontiguousarray(T)
    T.setflags(write=False)
    return T


def pair_table(field: FieldSpec) -> np.ndarray:
    return _pair_table(field)


def _as_codes(x) -> np.ndarray:
    if isinstance(x, Felt):
        return np.array([x.code], dtype=np.int64)
    return np.array([c.code if isinstance(c, Felt) else int(c) for c in np.ravel(x)], dtype=np.int64)


def additive_inner(field: FieldSpec, v, w) -> Felt:
    """The additive inner product of two words (result in F_p)."""
    T = pair_table(field)
    v, w = _as_codes(v), _as_codes(w)
    if v.shape != w.shape:
        raise ValueError("words must have the same length")
    val = int(T[v, w].sum() % field.p)
    out = field(val)
    assert out ** field.p == out
    return out


def hermitian_inner(field: FieldSpec, v, w) -> Felt:
    """sum_i v_i w_i^p."""
    _need_degree_two(field)
    v, w = _as_codes(v), _as_codes(w)
    if v.shape != w.shape:
        raise ValueError("words must have the same length")
    acc = 0
    for prod in field.mul_table[v, field.frob_table[w]]:
        acc = int(field.add_table[acc, prod])
    return field(acc)


def inner_matrix(field: FieldSpec, A: np.ndarray, B: np.ndarray, chunk: int = 1 << 22) -> np.ndarray:
    """All additive inner products between rows of A and rows of B, as integers mod p."""
    T = pair_table(field).astype(np.int64)
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    out = np.zeros((len(A), len(B)), dtype=np.int64)
    n = A.shape[1]
    step = max(1, chunk // max(1, len(B) * n))
    for s in range(0, len(A), step):
        blk = T[A[s:s + step, None, :], B[None, :, :]]
        out[s:s + step] = blk.sum(axis=2) % field.p
    return out


# ---------------------------------------------------------------------------
# row lemmas

@dataclass(frozen=True)
class RowCheck:
    ok: bool
    expected_distinct: int
    violation: tuple[int, int, int, int] | None = None  # (i, j, value, expected)

    def __bool__(self):
        return self.ok


def row_orthogonality_check(H: GHMatrix) -> RowCheck:
    """Inner products of all row pairs against the GH-row lemmas.

    Odd p: every pair gives 0.  p = 2: distinct rows give lambda mod 2 and a row
    with itself gives 0.  The parity rule needs both rows to have weight
    n - lambda, so pairs involving an all-zero row are expected to give 0.
    """
    F = H.field
    _need_degree_two(F)
    G = inner_matrix(F, H.entries, H.entries)
    expect = H.lam % 2 if F.p == 2 else 0
    want = np.full(G.shape, expect, dtype=np.int64)
    np.fill_diagonal(want, 0)
    zero_rows = ~H.entries.any(axis=1)
    want[zero_rows, :] = 0
    want[:, zero_rows] = 0
    bad = np.argwhere(G != want)
    if len(bad):
        i, j = map(int, bad[0])
        return RowCheck(False, expect, (i, j, int(G[i, j]), int(want[i, j])))
    return RowCheck(True, expect)


# ---------------------------------------------------------------------------
# codes

def _require_additive(C: Code):
    _need_degree_two(C.field)
    if not classify(C)["is_p_additive"]:
        raise NotAdditiveError("the code is not closed under addition")


def is_self_orthogonal(C: Code, full_check_limit: int = 256) -> bool:
    """C inside its additive dual, decided on an F_p-generator set.

    For codes with at most ``full_check_limit`` words all pairs are checked
    too, and the two answers must agree.
    """
    _require_additive(C)
    gens = fp_generators(C)
    ok = bool(np.all(inner_matrix(C.field, gens, gens) == 0))
    if len(C) <= full_check_limit:
        full = bool(np.all(inner_matrix(C.field, C.words, C.words) == 0))
        if full != ok:
            raise AssertionError("generator check and all-pairs check disagree")
    return ok


def dual_low_weight_scan(C: Code, wmax: int = 2) -> list[np.ndarray]:
    """Words of weight 1..wmax in the additive dual of C but not in C.

    Each candidate a*e_i + b*e_j is orthogonal to the generators g_1..g_d
    exactly when the signatures (T[a, g_l[i]])_l and (T[b, g_l[j]])_l are
    negatives of each other mod p, so candidates are matched by signature.
    """
    _require_additive(C)
    if wmax not in (1, 2):
        raise ValueError("only weights up to 2 are scanned")
    F = C.field
    n, q, p = C.length, F.q, F.p
    if n > SCAN_MAX_LENGTH:
        raise BudgetExceededError(
            f"length {n} > {SCAN_MAX_LENGTH}: {n * (q - 1) + comb(n, 2) * (q - 1) ** 2} candidates")
    gens = fp_generators(C)
    T = pair_table(F).astype(np.int64)
    # sig[a-1, i, l] = T[a, g_l[i]]
    sig = T[np.arange(1, q)[:, None, None], gens.T[None, :, :]]
    d = sig.shape[2]
    weights = np.array([p**l for l in range(d)], dtype=object if p**d >= 2**62 else np.int64)
    key = (sig.astype(weights.dtype) * weights).sum(axis=2)          # (q-1, n)
    neg_key = (((-sig) % p).astype(weights.dtype) * weights).sum(axis=2)

    found: list[np.ndarray] = []
    zero_pos = np.argwhere(key == 0)
    for a1, i in zero_pos:
        w = np.zeros(n, dtype=np.int64)
        w[i] = a1 + 1
        found.append(w)
    if wmax >= 2:
        buckets: dict = {}
        for a1 in range(q - 1):
            for i in range(n):
                buckets.setdefault(key[a1, i], []).append((i, a1 + 1))
        for a1 in range(q - 1):
            for i in range(n):
                for j, b in buckets.get(neg_key[a1, i], ()):
                    if j > i:
                        w = np.zeros(n, dtype=np.int64)
                        w[i] = a1 + 1
                        w[j] = b
                        found.append(w)
    if not found:
        return []
    W = np.array(found)
    W = W[~C.contains_many(W)]
    return sorted((row for row in W), key=lambda r: tuple(r))


def generator_text(C: Code) -> str:
    """F_p-generators of C, one word per line as element codes."""
    gens = fp_generators(C)
    lines = [f"# {len(gens)} F_{C.field.p}-generators of length {C.length}"]
    lines += [" ".join(str(int(x)) for x in g) for g in gens]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# quantum parameters

@dataclass(frozen=True)
class QuantumParams:
    n: int
    k: Fraction
    d: int
    q: int

    def __str__(self):
        k = self.k
        ks = str(k.numerator) if k.denominator == 1 else f"{float(k):g}"
        return f"[[{self.n}, {ks}, {self.d}]]_{self.q}"


@dataclass(frozen=True)
class QuantumReport:
    params: QuantumParams
    code_size: int
    self_orthogonal: bool
    dual_scan: str  # "empty", "nonempty" or "skipped"

    @property
    def certified(self) -> bool:
        return self.self_orthogonal and self.dual_scan == "empty"

    def to_json(self):
        k = self.params.k
        return {"n": self.params.n, "k": [k.numerator, k.denominator], "d": self.params.d,
                "q": self.params.q, "self_orthogonal": self.self_orthogonal,
                "dual_scan": self.dual_scan}

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def quantum_params(p: int, t: int) -> QuantumParams:
    """[[p^t, p^t - (t+2)/2, 3]] over GF(p^2)."""
    return QuantumParams(p**t, Fraction(2 * p**t - t - 2, 2), 3, p * p)


def quantum_report(M: GHMatrix, scan: bool = True) -> QuantumReport:
    F = M.field
    _need_degree_two(F)
    p = F.p
    if p == 2 and M.lam % 2:
        raise PreconditionFailedError(f"p = 2 needs an even lambda, got lambda = {M.lam}")
    _, C = extract_codes(M)
    if not classify(C)["is_p_additive"]:
        raise PreconditionFailedError("C_H is not F_p-additive")
    t, size = 0, 1
    while size < M.n:
        size *= p
        t += 1
    if size != M.n:
        raise PreconditionFailedError(f"order {M.n} is not a power of {p}")
    if len(C) != p ** (t + 2):
        raise PreconditionFailedError(f"|C_H| = {len(C)}, expected {p ** (t + 2)}")
    so = is_self_orthogonal(C)
    if scan and M.n <= SCAN_MAX_LENGTH:
        status = "empty" if not dual_low_weight_scan(C) else "nonempty"
    else:
        status = "skipped"
    return QuantumReport(quantum_params(p, t), len(C), so, status)

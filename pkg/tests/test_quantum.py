from __future__ import annotations

import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghcodes import constructions as cons
from ghcodes.finite_field import make_field
from ghcodes.gh_matrix import Code, GHMatrix, extract_codes
from ghcodes.invariants import fp_generators
from ghcodes.quantum import (SCAN_MAX_LENGTH, BudgetExceededError, DegreeNotTwoError,
                             NotAdditiveError, PreconditionFailedError, additive_inner, beta,
                             dual_low_weight_scan, generator_text, hermitian_inner, inner_matrix,
                             is_self_orthogonal, pair_table, quantum_params, quantum_report,
                             row_orthogonality_check)

F4 = make_field(2, 2)
F9 = make_field(3, 2)
F25 = make_field(5, 2)


def _direct_inner(F, v, w):
    """Oracle: the defining sum computed with Felt arithmetic."""
    acc = F.zero
    for a, b in zip(v, w):
        a, b = F(int(a)), F(int(b))
        acc = acc + a * b ** F.p - a ** F.p * b
    if F.p != 2:
        acc = acc * F.w ** ((F.p + 1) // 2)
    return acc


def test_beta():
    assert beta(F4) == 1
    for F in (F9, F25):
        b = F(beta(F))
        assert b ** F.p == -b
    with pytest.raises(DegreeNotTwoError):
        beta(make_field(2, 3))


@pytest.mark.parametrize("F", [F4, F9, F25], ids=lambda F: str(F.q))
def test_pair_table_matches_definition(F):
    T = pair_table(F)
    assert T.max() < F.p
    for a in range(F.q):
        for c in range(F.q):
            assert T[a, c] == _direct_inner(F, [a], [c]).code


word_pairs = st.sampled_from([F4, F9, F25]).flatmap(
    lambda F: st.integers(1, 8).flatmap(
        lambda n: st.tuples(st.just(F),
                            *[st.lists(st.integers(0, F.q - 1), min_size=n, max_size=n)] * 3)))


@given(word_pairs)
@settings(max_examples=200, deadline=None)
def test_inner_is_fp_valued_bilinear_alternating(args):
    F, u, v, w = args
    x = additive_inner(F, v, w)
    assert x ** F.p == x and x.code < F.p
    assert x == _direct_inner(F, v, w)
    assert additive_inner(F, w, v) == -x
    assert additive_inner(F, v, v) == F.zero
    uv = F.add_table[np.array(u), np.array(v)]
    assert additive_inner(F, uv, w) == additive_inner(F, u, w) + x
    for a in range(F.p):
        assert additive_inner(F, F.mul_table[a, np.array(v)], w) == a * x


def test_inner_examples():
    w = [1, 2, 3]
    assert additive_inner(F4, [0, 0, 0], w) == F4.zero
    M = cons.gh_p2_one(3)
    assert additive_inner(F9, M.entries[1], M.entries[5]) == F9.zero
    S4 = cons.multiplication_table(F4)
    assert additive_inner(F4, S4.entries[1], S4.entries[2]) == F4.one
    with pytest.raises(ValueError):
        additive_inner(F4, [1], [1, 2])
    with pytest.raises(DegreeNotTwoError):
        additive_inner(make_field(2, 3), [1], [1])


def test_hermitian_inner():
    assert hermitian_inner(F4, [1, 2], [0, 0]) == F4.zero
    assert hermitian_inner(F4, [1], [1]) == F4.one
    assert hermitian_inner(F4, [1, 1, 1, 1], [1, 1, 1, 1]) == F4.zero
    v, w = [2, 3, 1], [3, 3, 2]
    want = sum((F4(a) * F4(b) ** 2 for a, b in zip(v, w)), F4.zero)
    assert hermitian_inner(F4, v, w) == want


def test_inner_matrix_agrees_with_pairwise():
    M = cons.switching_I(2, 2)
    G = inner_matrix(F4, M.entries, M.entries[:5])
    for i in range(M.n):
        for j in range(5):
            assert G[i, j] == additive_inner(F4, M.entries[i], M.entries[j]).code


def test_row_checks():
    for M in (cons.gh_p2_one(3), cons.gh_p2_one(5), cons.switching_I(2, 2),
              cons.projection_construction(2, 2, 3)):
        rc = row_orthogonality_check(M)
        assert rc.ok and rc.expected_distinct == 0
    S4 = cons.multiplication_table(F4)
    rc = row_orthogonality_check(S4)
    assert rc.ok and rc.expected_distinct == 1
    G = inner_matrix(F4, S4.entries[1:], S4.entries[1:])
    assert (G == 1 - np.eye(3, dtype=int)).all()


def test_row_lemma_holds_for_non_additive_gh():
    S = cons.multiplication_table(F4)
    B = GHMatrix(F4, S.entries[:, [0, 2, 1, 3]])
    assert row_orthogonality_check(cons.kronecker_sum(S, [S, B, S, S])).ok


def test_row_check_reports_violation():
    E = cons.switching_I(2, 2).entries.copy()
    E[3, 5] = F4.add_table[E[3, 5], 1]
    rc = row_orthogonality_check(GHMatrix(F4, E))
    assert not rc.ok
    i, j, got, want = rc.violation
    assert 3 in (i, j) and got != want


def test_self_orthogonality():
    _, C = extract_codes(cons.switching_I(2, 2))
    assert is_self_orthogonal(C)
    _, C = extract_codes(cons.gh_p2_one(3))
    assert is_self_orthogonal(C)
    _, C = extract_codes(cons.multiplication_table(F4))
    assert not is_self_orthogonal(C)
    with pytest.raises(NotAdditiveError):
        is_self_orthogonal(Code(F4, [[0, 0], [1, 2], [2, 1]]))


@pytest.mark.parametrize("build", [lambda: cons.switching_I(2, 2), lambda: cons.gh_p2_one(3),
                                   lambda: cons.projection_construction(2, 2, 3),
                                   lambda: cons.multiplication_table(F4),
                                   lambda: cons.sylvester(F4, 2)])
def test_generator_check_equals_all_pairs(build):
    _, C = extract_codes(build())
    all_pairs = bool(np.all(inner_matrix(C.field, C.words, C.words) == 0))
    assert is_self_orthogonal(C, full_check_limit=0) == all_pairs


def test_dual_scan():
    _, C = extract_codes(cons.switching_I(2, 2))
    assert dual_low_weight_scan(C) == []
    _, C = extract_codes(cons.gh_p2_one(3))
    assert dual_low_weight_scan(C) == []
    full = Code(F4, [[a, b] for a in range(4) for b in range(4)])
    assert dual_low_weight_scan(full) == []


def test_dual_scan_brute_force():
    # oracle: enumerate every weight <= 2 word and test it against all of C
    for M in (cons.multiplication_table(F4), cons.gh_p2_one(3), cons.projection_construction(2, 2, 3)):
        _, C = extract_codes(M)
        F, n = C.field, C.length
        want = []
        for i in range(n):
            for a in range(1, F.q):
                for j in range(i, n):
                    for b in range(0 if j == i else 1, F.q if j > i else 1):
                        w = np.zeros(n, dtype=int)
                        w[i] = a
                        if j > i:
                            w[j] = b
                        if np.all(inner_matrix(F, C.words, w[None, :]) == 0) and w not in C:
                            want.append(tuple(w))
        got = [tuple(w) for w in dual_low_weight_scan(C)]
        assert sorted(set(want)) == got


def test_dual_scan_finds_short_words():
    C = Code(F4, [[0, 0, 0, 0], [1, 1, 1, 0]])
    words = [tuple(w) for w in dual_low_weight_scan(C, wmax=1)]
    # T[a, 1] = a + a^2 vanishes only for a = 1 on the support; position 3 is free
    assert words == [(0, 0, 0, 1), (0, 0, 0, 2), (0, 0, 0, 3), (0, 0, 1, 0), (0, 1, 0, 0),
                     (1, 0, 0, 0)]
    with pytest.raises(ValueError):
        dual_low_weight_scan(C, wmax=3)


def test_dual_scan_budget():
    n = SCAN_MAX_LENGTH + 1
    C = Code(F4, np.zeros((1, n), dtype=int))
    with pytest.raises(BudgetExceededError):
        dual_low_weight_scan(C)


def test_quantum_params():
    assert str(quantum_params(2, 4)) == "[[16, 13, 3]]_4"
    assert str(quantum_params(3, 2)) == "[[9, 7, 3]]_9"
    assert quantum_params(2, 3).k == Fraction(11, 2)
    assert str(quantum_params(2, 3)) == "[[8, 5.5, 3]]_4"


def test_quantum_reports():
    rep = quantum_report(cons.switching_I(2, 2))
    assert rep.certified and str(rep.params) == "[[16, 13, 3]]_4" and rep.code_size == 64
    assert json.loads(rep.dumps()) == {"n": 16, "k": [13, 1], "d": 3, "q": 4,
                                       "self_orthogonal": True, "dual_scan": "empty"}
    rep = quantum_report(cons.gh_p2_one(3))
    assert rep.certified and str(rep.params) == "[[9, 7, 3]]_9"
    rep = quantum_report(cons.projection_construction(2, 2, 3))
    assert rep.params.k == Fraction(11, 2) and rep.self_orthogonal
    assert quantum_report(cons.switching_I(2, 2), scan=False).dual_scan == "skipped"


def test_quantum_preconditions():
    with pytest.raises(PreconditionFailedError):
        quantum_report(cons.multiplication_table(F4))
    with pytest.raises(DegreeNotTwoError):
        quantum_report(cons.fixed_example("H8_rank4"))


def test_even_lambda_codes_are_self_orthogonal():
    for M in (cons.switching_I(2, 2), cons.sylvester(F4, 2), cons.projection_construction(2, 2, 4),
              cons.gh_p2_one(5), cons.switching_I(3, 2), cons.sylvester(F9, 2)):
        _, C = extract_codes(M)
        assert is_self_orthogonal(C)


def test_generator_text():
    _, C = extract_codes(cons.switching_I(2, 2))
    text = generator_text(C)
    lines = text.strip().split("\n")
    assert lines[0] == "# 6 F_2-generators of length 16"
    gens = np.array([[int(x) for x in ln.split()] for ln in lines[1:]])
    assert np.array_equal(gens, fp_generators(C))

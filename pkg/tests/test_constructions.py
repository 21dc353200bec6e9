from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghcodes import constructions as cons
from ghcodes.finite_field import FieldMismatchError, make_field
from ghcodes.gh_matrix import Code, extract_codes, format_ghm, verify_gh
from ghcodes.invariants import classify, invariant_report

F4 = make_field(2, 2)
F8 = make_field(2, 3)
F9 = make_field(3, 2)


def rk(M):
    rep = invariant_report(M)
    assert rep.is_p_additive
    return rep.rank, rep.ker


def _body(name):
    return "".join(ln for ln in cons.fixture_text(name).splitlines(keepends=True)
                   if not ln.startswith("#"))


def test_sylvester():
    S1 = cons.sylvester(F4, 1)
    assert S1 == cons.multiplication_table(F4)
    assert S1.entries[1].tolist() == [0, 1, 2, 3]
    assert rk(cons.sylvester(F4, 2)) == (3, 3)
    S = cons.sylvester(make_field(3), 2)
    assert S.n == 9 and verify_gh(S)
    with pytest.raises(cons.ParamRangeError):
        cons.sylvester(F4, 0)


def test_kronecker_sum():
    S = cons.multiplication_table(F4)
    assert cons.kronecker_sum(S, S) == cons.sylvester(F4, 2)
    P = cons.projection_construction(2, 2, 3)
    assert rk(cons.kronecker_sum(S, P)) == (5, 2)
    assert rk(cons.kronecker_sum(P, P)) == (7, 1)
    with pytest.raises(cons.SizeMismatchError):
        cons.kronecker_sum(S, [S, S])
    with pytest.raises(cons.SizeMismatchError):
        cons.kronecker_sum(S, [S, S, S, P])
    with pytest.raises(FieldMismatchError):
        cons.kronecker_sum(S, cons.multiplication_table(F8))


def test_kronecker_block_layout():
    S = cons.multiplication_table(F4)
    P = cons.projection_construction(2, 2, 3)
    K = cons.kronecker_sum(S, P)
    for i in range(4):
        for j in range(4):
            block = K.entries[8 * i:8 * i + 8, 8 * j:8 * j + 8]
            assert np.array_equal(block, F4.add_table[S.entries[i, j], P.entries])


def test_switching_I():
    M = cons.switching_I(2, 2)
    assert format_ghm(M) == _body("SW1_16x16")
    assert rk(M) == (4, 2)
    assert rk(cons.switching_I(3, 2)) == (4, 2)
    _, C = extract_codes(M)
    assert classify(C) == {"is_p_additive": True, "is_q_linear": False}
    with pytest.raises(cons.ParamRangeError):
        cons.switching_I(3, 1)


def test_switching_II():
    assert rk(cons.switching_II(2, 2, 2, 1)) == (4, 2)
    assert rk(cons.switching_II(2, 3, 2, 2)) == (5, 2)
    with pytest.raises(cons.ParamRangeError):
        cons.switching_II(2, 2, 2, 2)
    with pytest.raises(cons.ParamRangeError):
        cons.switching_II(2, 2, 1, 1)


def test_switching_II_order_729():
    M = cons.switching_II(3, 2, 3, 1)
    assert M.n == 729
    assert rk(M) == (5, 3)


def test_switching_III():
    assert cons.switching_III(2, 3, 3, [2]) == cons.switching_II(2, 3, 3, 2)
    M = cons.switching_III(2, 2, 3, [1, 1])
    assert M.n == 64 and rk(M) == (6, 2)
    assert rk(cons.switching_III(2, 3, 2, [2])) == (5, 2)
    with pytest.raises(cons.ParamRangeError):
        cons.switching_III(2, 2, 3, [1, 1, 1])
    with pytest.raises(cons.ParamRangeError):
        cons.switching_III(2, 2, 3, [])
    with pytest.raises(cons.ParamRangeError):
        cons.switching_III(2, 3, 3, [3])


def test_projection():
    M = cons.projection_construction(2, 2, 3)
    assert format_ghm(M) == _body("PROJ_8x8")
    assert M.lam == 2
    assert rk(cons.projection_construction(2, 2, 4)) == (5, 1)
    assert rk(cons.projection_construction(3, 2, 3)) == (4, 1)
    with pytest.raises(cons.ParamRangeError):
        cons.projection_construction(2, 2, 2)
    with pytest.raises(cons.ParamRangeError):
        cons.projection_construction(2, 1, 3)
    with pytest.raises(cons.ConstructionError):
        cons.projection_construction(2, 2, 3, source_poly=(1, 0, 0))


def test_gh_p2_one_structure():
    M = cons.gh_p2_one(3)
    F = M.field
    v1, v2 = cons.gh_p2_vectors(F)
    assert v1.tolist() == F.power_order().tolist()
    # position i holds w^(ip): w^p times the Frobenius image of v_1
    assert np.array_equal(v2, F.mul_table[F.exp[F.p], F.frob_table[v1]])
    rows = [tuple(F.add_table[F.mul_table[a, v1], F.mul_table[b, v2]])
            for a in range(3) for b in range(3)]
    assert [tuple(r) for r in M.entries] == rows
    assert not M.entries[0].any()
    assert verify_gh(M) and rk(M) == (3, 1)
    _, C = extract_codes(M)
    assert classify(C) == {"is_p_additive": True, "is_q_linear": False}


def test_gh_p2_one_p5_and_p2():
    M = cons.gh_p2_one(5)
    assert M.n == 25 and verify_gh(M) and rk(M) == (3, 1)
    with pytest.raises(cons.ParamRangeError):
        cons.gh_p2_one(2)


def test_fixed_examples():
    H8 = cons.fixed_example("H8_rank4")
    assert H8.field == F8 and rk(H8) == (4, 1)
    H81 = cons.fixed_example("H81_3")
    assert H81.n == 81 and verify_gh(H81) and rk(H81) == (3, 1)
    with pytest.raises(cons.ConstructionError):
        cons.fixed_example("H9")
    with pytest.raises(cons.ConstructionError):
        cons.Fixed("nope")


def test_h81_5_is_gh():
    M = cons.fixed_example("H81_5")
    assert M.n == 625
    assert verify_gh(M)


def test_h81_5_needs_its_relation():
    # with the default relation of GF(5^4) the same recipe does not give a GH matrix
    F = make_field(5, 4)
    assert F.poly != cons.FIXED_POLYS["H81_5"]
    q = F.q
    v1 = F.power_order()
    v2 = np.concatenate([[0], F.exp[(6 + 25 * np.arange(q - 1)) % (q - 1)]])
    w = F.w.code
    rows = cons.f_span_rows(F, [v1, F.mul_table[w, v1], v2, F.mul_table[w, v2]], range(5))
    assert not verify_gh(rows, F)


def test_h8_fixture_repair_is_unique():
    text = cons.fixture_text("H8_rank4")
    assert "stray symbol" in text
    H8 = cons.fixed_example("H8_rank4")
    hits = []
    for v in range(8):
        E = H8.entries.copy()
        E[4, 3] = v
        if verify_gh(E, F8) and classify(Code(F8, E))["is_p_additive"]:
            hits.append(v)
    assert hits == [F8.w.code]


def test_block_vectors():
    n = F8.q ** 3
    used = []
    for z in (1, 2):
        for j in range(1, F8.e):
            g = cons.block_vector(F8, n, z, j)
            block = set(range(j * 8**z, (j + 1) * 8**z))
            # the symbol 0 sits on the first q^(z-1) positions of the block
            assert len(np.nonzero(g)[0]) == 8**z - 8 ** (z - 1)
            assert set(np.nonzero(g)[0]) <= block
            used.append(block)
    for a in range(len(used)):
        for b in range(a + 1, len(used)):
            assert not used[a] & used[b]
    with pytest.raises(cons.ParamRangeError):
        cons.block_vector(F8, n, 1, 0)
    with pytest.raises(cons.ParamRangeError):
        cons.block_vector(F8, 64, 2, 1)


def test_block_vector_values():
    g = cons.block_vector(F4, 64, 2, 1)
    seg = g[16:32]
    assert seg.tolist() == np.repeat(F4.power_order(), 4).tolist()
    assert not g[:16].any() and not g[32:].any()


LAYOUTS = {
    "I(2,2)": cons.switching_I_layout(2, 2),
    "I(3,2)": cons.switching_I_layout(3, 2),
    "II(2,3,2,2)": cons.switching_III_layout(2, 3, 2, [2]),
    "III(2,2,3,[1,1])": cons.switching_III_layout(2, 2, 3, [1, 1]),
    "III(2,3,3,[2,1])": cons.switching_III_layout(2, 3, 3, [2, 1]),
}


@given(st.sampled_from(sorted(LAYOUTS)), st.data())
@settings(max_examples=80, deadline=None)
def test_coset_algebra(key, data):
    L = LAYOUTS[key]
    F = L.field
    labels = st.lists(st.integers(0, F.q - 1), min_size=L.m, max_size=L.m)
    b, c = data.draw(labels), data.draw(labels)
    bc = [int(F.add_table[x, y]) for x, y in zip(b, c)]
    K = Code(F, L.kernel_rows())
    lhs = Code(F, F.add_table[L.coset(b)[:, None, :], L.coset(c)[None, :, :]].reshape(-1, L.n))
    assert lhs == Code(F, L.coset(bc))
    assert K == Code(F, L.coset([0] * L.m))


def test_layout_matrix_matches_builder():
    assert LAYOUTS["I(2,2)"].matrix() == cons.switching_I(2, 2)
    assert LAYOUTS["III(2,2,3,[1,1])"].matrix() == cons.switching_III(2, 2, 3, [1, 1])


RECIPES = [
    cons.Sylvester(2, 2, 2),
    cons.Projection(2, 2, 4),
    cons.GHp2(3),
    cons.Fixed("H8_rank4"),
    cons.SwitchI(2, 2),
    cons.SwitchII(2, 3, 2, 1),
    cons.SwitchIII(2, 2, 3, (1, 1)),
    cons.Kron(cons.Sylvester(2, 2, 1), cons.Projection(2, 2, 3)),
    cons.kron_chain([cons.Sylvester(2, 2, 1)] * 2 + [cons.Projection(2, 2, 3)]),
]


@pytest.mark.parametrize("recipe", RECIPES, ids=str)
def test_recipe_declares_what_it_builds(recipe):
    M = recipe.build()
    d = recipe.declared()
    assert M.n == d.p ** d.t and M.field.p == d.p and M.field.e == d.e
    assert verify_gh(M)
    assert rk(M) == (d.rank, d.ker)


@pytest.mark.parametrize("recipe", RECIPES, ids=str)
def test_recipe_json_round_trip(recipe):
    again = cons.recipe_from_json(json.loads(recipe.dumps()))
    assert again == recipe
    assert str(again) == str(recipe)


def test_recipe_validation():
    with pytest.raises(cons.ParamRangeError):
        cons.Projection(2, 2, 2)
    with pytest.raises(cons.ParamRangeError):
        cons.GHp2(2)
    with pytest.raises(cons.ParamRangeError):
        cons.SwitchII(2, 2, 2, 2)
    with pytest.raises(cons.ParamRangeError):
        cons.SwitchIII(2, 2, 2, (1, 1))
    with pytest.raises(FieldMismatchError):
        cons.Kron(cons.Sylvester(2, 2, 1), cons.Sylvester(3, 2, 1))
    with pytest.raises(cons.ConstructionError):
        cons.recipe_from_json({"kind": "magic"})


def test_kron_chain_nests_to_the_right():
    a, b, c = cons.Sylvester(2, 2, 1), cons.SwitchI(2, 2), cons.Projection(2, 2, 3)
    assert cons.kron_chain([a, b, c]) == cons.Kron(a, cons.Kron(b, c))
    assert cons.kron_chain([c]) == c

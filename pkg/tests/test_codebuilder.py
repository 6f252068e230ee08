import json

import numpy as np
import pytest
from conftest import dense_rank
from hypothesis import given, settings
from hypothesis import strategies as st

from sdbb import gf2
from sdbb.codebuilder import (
    PauliVector,
    _fold_weight_three,
    build_code,
    code_from_strings,
    compute_k_groebner,
    compute_k_quotient,
    compute_k_rank,
    doubly_even_check,
    export_code_json,
    group_algebra_matrix,
    load_code_json,
    logical_basis,
)
from sdbb.gf2poly import LaurentPoly, antipode, parse_poly, poly_mul
from sdbb.torus import DegenerateTorusError, canonicalize_torus, reduce_poly, transform_torus, unimodular_normalize


# --- oracle: cells found by brute-force lattice membership -------------------


def _same_class(p, q, a1, a2):
    det = a1[0] * a2[1] - a1[1] * a2[0]
    vx, vy = p[0] - q[0], p[1] - q[1]
    return (vx * a2[1] - vy * a2[0]) % det == 0 and (a1[0] * vy - a1[1] * vx) % det == 0


def oracle_checks(f: LaurentPoly, g: LaurentPoly, a1, a2):
    det = abs(a1[0] * a2[1] - a1[1] * a2[0])
    reps: list[tuple[int, int]] = []
    for i in range(det):
        for j in range(det):
            if not any(_same_class((i, j), r, a1, a2) for r in reps):
                reps.append((i, j))
    assert len(reps) == det

    def cell(p):
        return next(k for k, r in enumerate(reps) if _same_class(p, r, a1, a2))

    def rows(p0, p1):
        h = np.zeros((det, 2 * det), dtype=np.uint8)
        for c, (i, j) in enumerate(reps):
            for s, p in ((0, p0), (1, p1)):
                for m in p.terms:
                    h[c, s * det + cell((i + m.ex, j + m.ey))] ^= 1
        return h

    return rows(f, g), rows(antipode(g), antipode(f))


exps = st.tuples(st.integers(-2, 2), st.integers(-2, 2))
polys = st.sets(exps, min_size=2, max_size=4).map(lambda s: LaurentPoly.from_terms(s | {(0, 0)}))
tori = st.tuples(st.integers(1, 5), st.integers(-4, 4), st.integers(1, 5)).map(
    lambda t: ((t[0], t[1]), (0, t[2]))
)


@settings(max_examples=40)
@given(polys, tori)
def test_k_three_routes_against_oracle(f, lattice):
    a1, a2 = lattice
    torus = canonicalize_torus(a1, a2)
    code = build_code(f, torus)
    hx, hz = oracle_checks(f, antipode(f), a1, a2)
    k_oracle = 2 * torus.n_cells - dense_rank(hx) - dense_rank(hz)
    assert compute_k_rank(code) == k_oracle
    assert compute_k_quotient(f, antipode(f), torus) == k_oracle
    assert compute_k_groebner(f, antipode(f), torus) == k_oracle


@settings(max_examples=25)
@given(polys, polys, tori)
def test_k_routes_general_pair(f, g, lattice):
    torus = canonicalize_torus(*lattice)
    code = build_code(f, torus, g)
    hx, hz = oracle_checks(f, g, *lattice)
    assert not gf2.matmul(code.h_x, code.h_z.T).any()
    k = compute_k_rank(code)
    assert k == 2 * torus.n_cells - dense_rank(hx) - dense_rank(hz)
    assert compute_k_quotient(f, g, torus) == k == compute_k_groebner(f, g, torus)


@pytest.mark.parametrize(
    "fixture, n, k",
    [("color_6", 6, 4), ("color_18", 18, 4), ("code_16", 16, 4), ("code_56", 56, 6)],
)
def test_known_parameters(request, fixture, n, k):
    code = request.getfixturevalue(fixture)
    assert (code.n, compute_k_rank(code)) == (n, k)


def test_group_algebra_matrix_is_multiplication():
    torus = canonicalize_torus((0, 6), (3, 3))
    f, g = parse_poly("1 + x + y^-1"), parse_poly("1 + x*y")
    mat = group_algebra_matrix(f, g, torus)
    u, v = parse_poly("x + y^2"), parse_poly("1 + x^2")

    def vec(p):
        out = np.zeros(torus.n_cells, dtype=np.uint8)
        for m in reduce_poly(p, torus).terms:
            out[torus.cell_index(m.ex, m.ey)] ^= 1
        return out

    got = gf2.matmul(mat, np.concatenate([vec(u), vec(v)]))
    want = vec(poly_mul(f, u) + poly_mul(g, v))
    assert np.array_equal(got, want)


def test_k_invariant_under_change_of_variables():
    torus = canonicalize_torus((0, 8), (4, 4))
    f = parse_poly("1 + x^2*y^3 + y + x^-1")
    new_f, mat = unimodular_normalize(f, pivot=(2, 3))
    k_old = compute_k_rank(build_code(f, torus))
    k_new = compute_k_rank(build_code(new_f, transform_torus(torus, mat)))
    assert k_old == k_new


def test_degenerate_and_zero_inputs():
    with pytest.raises(DegenerateTorusError):
        code_from_strings("1 + x", (1, 2), (2, 4))
    with pytest.raises(ValueError):
        build_code(LaurentPoly.from_terms([]), canonicalize_torus((0, 2), (1, 0)))


# --- logical basis -------------------------------------------------------------


@pytest.mark.parametrize("fixture", ["color_6", "color_18", "code_16", "code_56"])
def test_logical_basis_pairing(request, fixture):
    code = request.getfixturevalue(fixture)
    b = logical_basis(code)
    k = compute_k_rank(code)
    assert b.k == k
    assert np.array_equal(gf2.matmul(b.l_x, b.l_z.T), np.eye(k, dtype=np.uint8))
    assert not gf2.matmul(code.h_z, b.l_x.T).any()
    assert not gf2.matmul(code.h_x, b.l_z.T).any()
    assert dense_rank(np.vstack([code.h_x, b.l_x])) == dense_rank(code.h_x) + k
    assert dense_rank(np.vstack([code.h_z, b.l_z])) == dense_rank(code.h_z) + k
    assert np.array_equal(b.residual_form, gf2.matmul(b.l_x, b.l_x.T))


def test_residual_form_kinds(color_6, code_16):
    # all logical representatives of the [[6,4,2]] code have even weight
    assert logical_basis(color_6).form_kind == "hyperbolic"
    assert logical_basis(code_16).form_kind == "hyperbolic"
    odd = code_from_strings("1 + x + x^2*y + x^-1*y", (0, 3), (5, 0))
    b = logical_basis(odd)
    assert b.form_kind == "identity" and np.array_equal(b.l_x, b.l_z)


def test_non_self_dual_basis():
    code = code_from_strings("1 + x + y", (0, 6), (3, 3), g="1 + x^2 + y")
    assert not code.self_dual
    k = compute_k_rank(code)
    if k:
        b = logical_basis(code)
        assert np.array_equal(gf2.matmul(b.l_x, b.l_z.T), np.eye(k, dtype=np.uint8))


def test_fold_weight_three_disjoint():
    n = 16
    vecs = []
    for i in range(4):
        v = np.zeros(n, dtype=np.uint8)
        v[3 * i : 3 * i + 3] = 1
        vecs.append(v)
    folded = _fold_weight_three(vecs)
    m = np.array(folded)
    assert np.array_equal(gf2.matmul(m, m.T), np.eye(4, dtype=np.uint8))
    assert all(int(v.sum()) % 4 == 1 for v in folded)
    assert dense_rank(np.vstack([m, np.array(vecs)])) == 4


def test_fold_leaves_short_lists_alone():
    vecs = [np.eye(8, dtype=np.uint8)[i] for i in range(3)]
    assert all(np.array_equal(a, b) for a, b in zip(_fold_weight_three(vecs), vecs))


# --- doubly even, export --------------------------------------------------------


def test_doubly_even(code_16, code_56, color_6):
    assert doubly_even_check(code_16).condition_holds
    assert doubly_even_check(code_56).condition_holds
    rep = doubly_even_check(color_6)
    assert rep.self_dual and not rep.condition_holds and set(rep.generator_weights_mod4) == {2}
    other = code_from_strings("1 + x + y + y^-1", (0, 4), (2, 2), g="1 + x + y + x*y")
    assert not doubly_even_check(other).condition_holds


def test_export_round_trip(code_56):
    text = export_code_json(code_56)
    back = load_code_json(text)
    assert np.array_equal(back.h_x, code_56.h_x) and np.array_equal(back.h_z, code_56.h_z)
    data = json.loads(text)
    assert (data["n"], data["k"]) == (56, 6)
    row = list(data["h_x"][0])
    row[0] = "f" if row[0] != "f" else "0"
    data["h_x"][0] = "".join(row)
    with pytest.raises(ValueError):
        load_code_json(json.dumps(data))


# --- Pauli algebra against 2x2 matrices ---------------------------------------

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)


def matrix(p: PauliVector):
    out = np.array([[1.0 + 0j]])
    for x, z in zip(p.x_part, p.z_part):
        out = np.kron(out, (X if x else I2) @ (Z if z else I2))
    return (1j) ** p.phase * out


paulis = st.integers(1, 3).flatmap(
    lambda n: st.builds(
        PauliVector,
        st.lists(st.integers(0, 1), min_size=n, max_size=n).map(np.array),
        st.lists(st.integers(0, 1), min_size=n, max_size=n).map(np.array),
        st.integers(0, 3),
    )
)


@given(st.data())
def test_pauli_product_matches_matrices(data):
    p = data.draw(paulis)
    q = data.draw(
        st.builds(
            PauliVector,
            st.lists(st.integers(0, 1), min_size=p.n, max_size=p.n).map(np.array),
            st.lists(st.integers(0, 1), min_size=p.n, max_size=p.n).map(np.array),
            st.integers(0, 3),
        )
    )
    assert np.allclose(matrix(p * q), matrix(p) @ matrix(q))
    commute = np.allclose(matrix(p) @ matrix(q), matrix(q) @ matrix(p))
    assert p.symplectic(q) == (0 if commute else 1)

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from sdbb.gf2poly import parse_poly
from sdbb.torus import (
    DegenerateTorusError,
    NoPrimitiveTermError,
    TwistedTorus,
    canonicalize_torus,
    enumerate_decompositions,
    lattice_vectors,
    reduce_monomial,
    reduce_poly,
    transform_torus,
    unimodular_normalize,
)

vec = st.tuples(st.integers(-12, 12), st.integers(-12, 12))


def in_lattice(v, a1, a2) -> bool:
    """Is v an integer combination of a1, a2? (Cramer's rule oracle)"""
    det = a1[0] * a2[1] - a1[1] * a2[0]
    s = v[0] * a2[1] - v[1] * a2[0]
    t = a1[0] * v[1] - a1[1] * v[0]
    return s % det == 0 and t % det == 0


def sigma(n: int) -> int:
    return sum(d for d in range(1, n + 1) if n % d == 0)


@pytest.mark.parametrize(
    "a1, a2, triple",
    [
        ((0, 4), (2, 2), (4, 2, 2)),
        ((3, 0), (1, 1), (3, 1, 1)),
        ((3, 0), (0, 3), (3, 3, 0)),
        ((0, 11), (3, -3), (11, 3, 8)),
    ],
)
def test_known_normal_forms(a1, a2, triple):
    assert canonicalize_torus(a1, a2).triple == triple


def test_degenerate_basis():
    with pytest.raises(DegenerateTorusError):
        canonicalize_torus((1, 2), (2, 4))


@given(vec, vec)
def test_hnf_spans_same_lattice(a1, a2):
    assume(a1[0] * a2[1] - a1[1] * a2[0] != 0)
    t = canonicalize_torus(a1, a2)
    assert t.alpha * t.beta == abs(a1[0] * a2[1] - a1[1] * a2[0])
    assert 0 <= t.gamma < t.alpha
    b1, b2 = (0, t.alpha), (t.beta, t.gamma)
    for v in (a1, a2):
        assert in_lattice(v, b1, b2)
    for v in (b1, b2):
        assert in_lattice(v, a1, a2)


@given(vec, vec)
def test_basis_order_and_sign_irrelevant(a1, a2):
    assume(a1[0] * a2[1] - a1[1] * a2[0] != 0)
    t = canonicalize_torus(a1, a2)
    assert canonicalize_torus(a2, a1) == t
    assert canonicalize_torus((-a1[0], -a1[1]), a2) == t
    assert canonicalize_torus(a1, (a2[0] + a1[0], a2[1] + a1[1])) == t


@given(st.integers(1, 6), st.integers(1, 6), st.data())
def test_reduce_monomial_is_periodic_and_canonical(alpha, beta, data):
    gamma = data.draw(st.integers(0, alpha - 1))
    t = TwistedTorus(alpha, beta, gamma)
    m = data.draw(vec)
    i, j = reduce_monomial(m, t)
    assert 0 <= i < beta and 0 <= j < alpha
    assert in_lattice((m[0] - i, m[1] - j), (0, alpha), (beta, gamma))
    for shift in ((0, alpha), (beta, gamma)):
        assert reduce_monomial((m[0] + shift[0], m[1] + shift[1]), t) == (i, j)


def test_reduce_poly_cancels():
    t = TwistedTorus(4, 2, 2)
    assert reduce_poly(parse_poly("1 + y^-1"), t) == parse_poly("1 + y^3")
    assert not reduce_poly(parse_poly("1 + y^4"), t)


@pytest.mark.parametrize("n", [2, 4, 6, 12, 16, 36, 64])
def test_decomposition_count_is_sigma(n):
    # index-N sublattices of Z^2 number sigma(N); each appears once in HNF
    tori = enumerate_decompositions(n)
    assert len(tori) == sigma(n // 2)
    assert len({t.triple for t in tori}) == len(tori)
    assert all(t.n_qubits == n for t in tori)


def test_decompositions_reject_odd():
    with pytest.raises(ValueError):
        enumerate_decompositions(15)


@given(vec, vec)
def test_lattice_vectors_are_reduced(a1, a2):
    assume(a1[0] * a2[1] - a1[1] * a2[0] != 0)
    t = canonicalize_torus(a1, a2)
    u, v = lattice_vectors(t)
    assert abs(u[0] * v[1] - u[1] * v[0]) == t.n_cells
    nu, nv = np.dot(u, u), np.dot(v, v)
    assert nu <= nv and 2 * abs(np.dot(u, v)) <= nu


def test_unimodular_prefers_x():
    f = parse_poly("1 + x + y + y^-1")
    g, mat = unimodular_normalize(f)
    assert g == f and (mat == np.eye(2)).all()


@given(st.lists(vec, min_size=1, max_size=3))
def test_unimodular_makes_pivot_x(extra):
    f = parse_poly("1") + parse_poly("x^2*y^3")
    for e in extra:
        if e not in ((0, 0), (2, 3)):
            f = f + parse_poly(f"x^{e[0]}*y^{e[1]}")
    g, mat = unimodular_normalize(f, pivot=(2, 3))
    assert round(abs(np.linalg.det(mat))) == 1
    assert (1, 0) in g.term_set() and (0, 0) in g.term_set()
    assert len(g) == len(f)


def test_unimodular_without_primitive_term():
    with pytest.raises(NoPrimitiveTermError):
        unimodular_normalize(parse_poly("1 + x^2 + y^2"))


def test_transform_preserves_cell_count():
    t = canonicalize_torus((0, 8), (4, 4))
    f = parse_poly("1 + x^2*y^3 + y")
    _, mat = unimodular_normalize(f, pivot=(2, 3))
    assert transform_torus(t, mat).n_cells == t.n_cells

"""CSS parity-check matrices of bivariate bicycle codes on twisted tori.

Qubit ``(cell (i, j), sublattice s)`` sits in column
``s * alpha * beta + i * alpha + j``. Each cell contributes one X-check
(``f`` on sublattice 0, ``g`` on sublattice 1) and one Z-check
(``antipode(g)`` on sublattice 0, ``antipode(f)`` on sublattice 1). All
translated checks are kept even when they are linearly dependent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from sdbb import gf2
from sdbb.gf2poly import LaurentPoly, antipode, parse_poly, torus_quotient_dim
from sdbb.torus import TwistedTorus, canonicalize_torus, reduce_monomial


@dataclass(frozen=True, eq=False)
class CssCode:
    f: LaurentPoly
    g: LaurentPoly
    torus: TwistedTorus
    h_x: np.ndarray
    h_z: np.ndarray

    @property
    def n(self) -> int:
        return self.h_x.shape[1]

    @property
    def self_dual(self) -> bool:
        return bool(np.array_equal(self.h_x, self.h_z))

    def qubit(self, cell: tuple[int, int], sublattice: int) -> int:
        i, j = reduce_monomial(cell, self.torus)
        return sublattice * self.torus.n_cells + self.torus.cell_index(i, j)

    def qubit_position(self, q: int) -> tuple[float, float]:
        """Planar coordinates of qubit ``q`` (sublattice 1 offset by half a cell)."""
        s, c = divmod(q, self.torus.n_cells)
        i, j = divmod(c, self.torus.alpha)
        return i + 0.5 * s, j + 0.5 * s


@dataclass(frozen=True, eq=False)
class LogicalBasis:
    l_x: np.ndarray
    l_z: np.ndarray
    residual_form: np.ndarray

    @property
    def k(self) -> int:
        return self.l_x.shape[0]

    @property
    def form_kind(self) -> str:
        """``zero``, ``identity``, ``hyperbolic`` or ``other`` for the residual form."""
        q = self.residual_form
        k = q.shape[0]
        if not q.any():
            return "zero"
        if np.array_equal(q, np.eye(k, dtype=np.uint8)):
            return "identity"
        if k % 2 == 0 and np.array_equal(q, _hyperbolic(k)):
            return "hyperbolic"
        return "other"


@dataclass
class PauliVector:
    """``i**phase * X^x_part * Z^z_part`` (all X factors to the left)."""

    x_part: np.ndarray
    z_part: np.ndarray
    phase: int = 0

    def __post_init__(self):
        self.x_part = gf2.as_bits(self.x_part)
        self.z_part = gf2.as_bits(self.z_part)
        if self.x_part.shape != self.z_part.shape:
            raise ValueError("x and z parts must have the same length")
        self.phase %= 4

    @property
    def n(self) -> int:
        return self.x_part.shape[0]

    def __mul__(self, other: "PauliVector") -> "PauliVector":
        # X^a Z^b X^c Z^d = (-1)^{b.c} X^{a+c} Z^{b+d}
        sign = 2 * int(self.z_part.astype(np.int64) @ other.x_part.astype(np.int64) % 2)
        return PauliVector(
            self.x_part ^ other.x_part, self.z_part ^ other.z_part, self.phase + other.phase + sign
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PauliVector)
            and self.phase == other.phase
            and np.array_equal(self.x_part, other.x_part)
            and np.array_equal(self.z_part, other.z_part)
        )

    def symplectic(self, other: "PauliVector") -> int:
        return int((self.x_part @ other.z_part.astype(np.int64) + self.z_part @ other.x_part.astype(np.int64)) % 2)

    @classmethod
    def x_type(cls, support) -> "PauliVector":
        support = gf2.as_bits(support)
        return cls(support, np.zeros_like(support))

    @classmethod
    def z_type(cls, support) -> "PauliVector":
        support = gf2.as_bits(support)
        return cls(np.zeros_like(support), support)


def _pattern_matrix(p: LaurentPoly, t: TwistedTorus) -> np.ndarray:
    """``M[c', c] = 1`` iff cell ``c'`` appears in ``p`` translated to ``c``."""
    n = t.n_cells
    mat = np.zeros((n, n), dtype=np.uint8)
    for i, j in t.cells():
        c = t.cell_index(i, j)
        for m in p.terms:
            ii, jj = reduce_monomial((i + m.ex, j + m.ey), t)
            mat[t.cell_index(ii, jj), c] ^= 1
    return mat


def build_code(f: LaurentPoly, torus: TwistedTorus, g: LaurentPoly | None = None) -> CssCode:
    if not f:
        raise ValueError("f must be nonzero")
    if g is None:
        g = antipode(f)
    h_x = np.hstack([_pattern_matrix(f, torus).T, _pattern_matrix(g, torus).T])
    h_z = np.hstack([_pattern_matrix(antipode(g), torus).T, _pattern_matrix(antipode(f), torus).T])
    code = CssCode(f, g, torus, h_x, h_z)
    if gf2.matmul(h_x, h_z.T).any():
        raise AssertionError("X and Z checks fail to commute")
    return code


def code_from_strings(f: str, a1, a2, g: str | None = None) -> CssCode:
    torus = canonicalize_torus(a1, a2)
    return build_code(parse_poly(f), torus, parse_poly(g) if g else None)


def compute_k_rank(code: CssCode) -> int:
    return code.n - gf2.rank(code.h_x) - gf2.rank(code.h_z)


def group_algebra_matrix(f: LaurentPoly, g: LaurentPoly, torus: TwistedTorus) -> np.ndarray:
    """Matrix of ``(u, v) -> f u + g v`` on the torus group algebra."""
    return np.hstack([_multiplication_matrix(f, torus), _multiplication_matrix(g, torus)])


def _multiplication_matrix(p: LaurentPoly, t: TwistedTorus) -> np.ndarray:
    # column c is the image of the basis element x^i y^j under multiplication by p
    n = t.n_cells
    rows = []
    cols = []
    for i, j in t.cells():
        c = t.cell_index(i, j)
        for m in p.terms:
            rows.append(t.cell_index(*reduce_monomial((m.ex + i, m.ey + j), t)))
            cols.append(c)
    mat = np.zeros((n, n), dtype=np.int64)
    np.add.at(mat, (rows, cols), 1)
    return (mat & 1).astype(np.uint8)


def compute_k_quotient(f: LaurentPoly, g: LaurentPoly, torus: TwistedTorus) -> int:
    return 2 * (torus.n_cells - gf2.rank(group_algebra_matrix(f, g, torus)))


def compute_k_groebner(f: LaurentPoly, g: LaurentPoly, torus: TwistedTorus) -> int:
    """Slow third route: Buchberger on the ideal with the boundary relations."""
    return 2 * torus_quotient_dim(f, g, torus.alpha, torus.beta, torus.gamma)


# ----------------------------------------------------------------------------
# logical operators


def _hyperbolic(k: int) -> np.ndarray:
    q = np.zeros((k, k), dtype=np.uint8)
    for i in range(0, k - 1, 2):
        q[i, i + 1] = q[i + 1, i] = 1
    return q


def _dot(u: np.ndarray, v: np.ndarray) -> int:
    return int(u.astype(np.int64) @ v.astype(np.int64) % 2)


def _canonical_form_basis(vectors: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Rebase a nondegenerate dot-product space toward an orthonormal basis.

    Greedy congruence reduction over GF(2): split off vectors of odd
    self-product one at a time; alternating remainders are split as
    hyperbolic pairs, and each pair is folded into an orthonormal vector
    (e, u, w -> e+u, e+w, e+u+w) when one is available. The Gram matrix
    of the result is the identity unless the whole space is alternating,
    in which case it is a direct sum of hyperbolic planes.
    """
    rest = [v.copy() for v in vectors]
    ortho: list[np.ndarray] = []
    pairs: list[tuple[np.ndarray, np.ndarray]] = []
    while rest:
        odd = next((i for i, v in enumerate(rest) if _dot(v, v)), None)
        if odd is not None:
            e = rest.pop(odd)
            rest = [v ^ e if _dot(v, e) else v for v in rest]
            ortho.append(e)
            continue
        u = rest.pop(0)
        j = next((i for i, v in enumerate(rest) if _dot(u, v)), None)
        if j is None:
            raise ValueError("logical form is degenerate")
        w = rest.pop(j)
        new_rest = []
        for v in rest:
            if _dot(v, w):
                v = v ^ u
            if _dot(v, u):
                v = v ^ w
            new_rest.append(v)
        rest = new_rest
        if ortho:
            e = ortho.pop()
            ortho.extend([e ^ u, e ^ w, e ^ u ^ w])
        else:
            pairs.append((u, w))
    # self-products are invariant under adding alternating vectors, so
    # ``pairs`` is only nonempty when no odd vector ever existed
    out = _fold_weight_three(ortho)
    for u, w in pairs:
        out.extend([u, w])
    return out


def _fold_weight_three(ortho: list[np.ndarray]) -> list[np.ndarray]:
    """Trade four orthonormal vectors of weight 3 mod 4 for four of weight 1.

    For orthonormal e1..e4 the vectors ``s + e_i`` (``s`` their sum) are again
    orthonormal and span the same space; when every ``e_i`` has weight
    3 mod 4 (and overlaps are even) each new vector has weight 1 mod 4.
    The count of weight-3 vectors mod 4 cannot change, so at most three
    remain.
    """
    ortho = [v.copy() for v in ortho]
    while True:
        threes = [i for i, v in enumerate(ortho) if int(v.sum()) % 4 == 3]
        if len(threes) < 4:
            return ortho
        quad = threes[:4]
        s = ortho[quad[0]] ^ ortho[quad[1]] ^ ortho[quad[2]] ^ ortho[quad[3]]
        new = [s ^ ortho[i] for i in quad]
        if any(int(v.sum()) % 4 != 1 for v in new):
            return ortho  # overlaps not even; leave the basis alone
        for i, v in zip(quad, new):
            ortho[i] = v


def logical_basis(code: CssCode) -> LogicalBasis:
    """Symplectically paired logical supports with ``l_x @ l_z.T == I``.

    For self-dual codes the X and Z logicals span the same quotient space,
    so ``l_x @ l_x.T`` cannot vanish alongside the pairing; the basis is
    chosen to make it the identity where possible (``l_x == l_z``) and the
    achieved form is stored as ``residual_form``.
    """
    if code.self_dual:
        ker = gf2.nullspace(code.h_x)
        reps = gf2.complement_basis(code.h_x, ker)
        if reps.shape[0] == 0:
            raise ValueError("code has no logical qubits (k = 0)")
        l_x = np.array(_canonical_form_basis(list(reps)), dtype=np.uint8)
        form = gf2.matmul(l_x, l_x.T)
        l_z = gf2.matmul(gf2.inverse(form), l_x)
    else:
        l_x = gf2.complement_basis(code.h_x, gf2.nullspace(code.h_z))
        l_z = gf2.complement_basis(code.h_z, gf2.nullspace(code.h_x))
        if l_x.shape[0] == 0:
            raise ValueError("code has no logical qubits (k = 0)")
        pairing = gf2.matmul(l_x, l_z.T)
        l_z = gf2.matmul(gf2.inverse(pairing).T, l_z)
        form = gf2.matmul(l_x, l_x.T)
    basis = LogicalBasis(l_x, l_z, form)
    assert np.array_equal(gf2.matmul(l_x, l_z.T), np.eye(basis.k, dtype=np.uint8))
    return basis


# ----------------------------------------------------------------------------
# doubly-even condition


@dataclass
class DoublyEvenReport:
    self_dual: bool
    generator_weights_mod4: list[int]
    pairwise_overlaps_even: bool
    condition_holds: bool = field(init=False)

    def __post_init__(self):
        self.condition_holds = (
            self.self_dual
            and all(w == 0 for w in self.generator_weights_mod4)
            and self.pairwise_overlaps_even
        )


def doubly_even_check(code: CssCode) -> DoublyEvenReport:
    weights = (code.h_x.sum(axis=1) % 4).astype(int).tolist()
    overlaps_even = not gf2.matmul(code.h_x, code.h_x.T).any()
    return DoublyEvenReport(code.self_dual, weights, overlaps_even)


# ----------------------------------------------------------------------------
# export


def _hex_row(row: np.ndarray) -> str:
    n = row.shape[0]
    nibbles = (n + 3) // 4
    return np.packbits(row, bitorder="big").tobytes().hex()[:nibbles]


def _row_from_hex(text: str, n: int) -> np.ndarray:
    raw = bytes.fromhex(text + "0" * (len(text) % 2))
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="big")
    return bits[:n].astype(np.uint8)


def code_to_dict(code: CssCode) -> dict:
    k = compute_k_rank(code)
    return {
        "f": str(code.f),
        "g": str(code.g),
        "a1": list(code.torus.a1),
        "a2": list(code.torus.a2),
        "n": code.n,
        "k": k,
        "h_x": [_hex_row(r) for r in code.h_x],
        "h_z": [_hex_row(r) for r in code.h_z],
    }


def export_code_json(code: CssCode) -> str:
    return json.dumps(code_to_dict(code), indent=1)


def load_code_json(text: str) -> CssCode:
    """Rebuild a code from :func:`export_code_json`, checking the stored matrices."""
    data = json.loads(text)
    code = code_from_strings(data["f"], data["a1"], data["a2"], data.get("g"))
    n = data["n"]
    h_x = np.array([_row_from_hex(r, n) for r in data["h_x"]], dtype=np.uint8)
    h_z = np.array([_row_from_hex(r, n) for r in data["h_z"]], dtype=np.uint8)
    if not (np.array_equal(h_x, code.h_x) and np.array_equal(h_z, code.h_z)):
        raise ValueError("stored matrices disagree with the rebuilt code")
    return code

"""Dense GF(2) linear algebra on top of the packed kernels.

Matrices at this level are ``uint8`` arrays of zeros and ones.
"""

from __future__ import annotations

import numpy as np

from sdbb import kernels


def as_bits(a) -> np.ndarray:
    return np.asarray(a, dtype=np.uint8) & 1


def rref(a: np.ndarray, order: np.ndarray | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of ``a`` and its pivot columns."""
    a = np.atleast_2d(as_bits(a))
    rows, n = a.shape
    if rows == 0 or n == 0:
        return a.copy(), []
    packed = kernels.pack_rows(a)
    if order is None:
        order = np.arange(n, dtype=np.int64)
    pivots = kernels.rref_packed(packed, np.asarray(order, dtype=np.int64))
    piv = [int(p) for p in pivots if p >= 0]
    return kernels.unpack_rows(packed, n), piv


def rank(a: np.ndarray) -> int:
    a = np.atleast_2d(as_bits(a))
    if a.size == 0:
        return 0
    return len(rref(a)[1])


def row_basis(a: np.ndarray) -> np.ndarray:
    red, piv = rref(a)
    return red[: len(piv)]


def nullspace(a: np.ndarray) -> np.ndarray:
    """Basis (as rows) of ``{v : a v = 0}``."""
    a = np.atleast_2d(as_bits(a))
    n = a.shape[1]
    red, piv = rref(a)
    free = [c for c in range(n) if c not in set(piv)]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, p in enumerate(piv):
            basis[i, p] = red[r, f]
    return basis


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (as_bits(a).astype(np.int64) @ as_bits(b).astype(np.int64) % 2).astype(np.uint8)


def in_rowspace(a: np.ndarray, v: np.ndarray) -> bool:
    return rank(np.vstack([a, v])) == rank(a)


def solve_left(a: np.ndarray, v: np.ndarray) -> np.ndarray | None:
    """Coefficients ``c`` with ``c @ a == v`` over GF(2), or ``None``."""
    a = np.atleast_2d(as_bits(a))
    v = as_bits(v)
    rows, n = a.shape
    aug = np.hstack([a, np.eye(rows, dtype=np.uint8)])
    red, piv = rref(aug, order=np.arange(n, dtype=np.int64))
    x = v.copy()
    coeff = np.zeros(rows, dtype=np.uint8)
    for i, p in enumerate(piv):
        if x[p]:
            x ^= red[i, :n]
            coeff ^= red[i, n:]
    if x.any():
        return None
    return coeff


def inverse(a: np.ndarray) -> np.ndarray:
    a = as_bits(a)
    k = a.shape[0]
    red, piv = rref(np.hstack([a, np.eye(k, dtype=np.uint8)]), order=np.arange(k, dtype=np.int64))
    if piv != list(range(k)):
        raise np.linalg.LinAlgError("matrix is singular over GF(2)")
    return red[:, k:]


def complement_basis(sub: np.ndarray, space: np.ndarray) -> np.ndarray:
    """Rows of ``space`` that extend a basis of ``rowspace(sub)``.

    Returns ``dim(space) - rank(sub)`` vectors (assuming ``sub`` lies in
    ``rowspace(space)``) whose images form a basis of the quotient.
    """
    sub = row_basis(sub) if np.atleast_2d(sub).size else np.zeros((0, space.shape[1]), np.uint8)
    r0 = sub.shape[0]
    stacked = np.vstack([sub, space]).T  # columns = vectors
    _, piv = rref(stacked)
    picked = [p - r0 for p in piv if p >= r0]
    return as_bits(space)[picked]

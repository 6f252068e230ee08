"""Twisted-torus geometry: Hermite normal form, cells, decompositions."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from sdbb.gf2poly import LaurentPoly, Monomial

log = logging.getLogger(__name__)


class DegenerateTorusError(ValueError):
    pass


class NoPrimitiveTermError(ValueError):
    pass


@dataclass(frozen=True)
class TwistedTorus:
    """Lattice of periods spanned by ``(0, alpha)`` and ``(beta, gamma)``.

    ``a1`` and ``a2`` keep the basis as the user wrote it; equality and
    hashing only look at the canonical triple.
    """

    alpha: int
    beta: int
    gamma: int
    a1: tuple[int, int] = field(default=None, compare=False)
    a2: tuple[int, int] = field(default=None, compare=False)

    def __post_init__(self):
        if self.a1 is None:
            object.__setattr__(self, "a1", (0, self.alpha))
        if self.a2 is None:
            object.__setattr__(self, "a2", (self.beta, self.gamma))

    @property
    def n_cells(self) -> int:
        return self.alpha * self.beta

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_cells

    @property
    def triple(self) -> tuple[int, int, int]:
        return self.alpha, self.beta, self.gamma

    def cell_index(self, i: int, j: int) -> int:
        return i * self.alpha + j

    def cells(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.beta) for j in range(self.alpha)]

    def __str__(self) -> str:
        return f"({self.a1[0]},{self.a1[1]}),({self.a2[0]},{self.a2[1]})"


def canonicalize_torus(a1, a2) -> TwistedTorus:
    """Column Hermite normal form of the period lattice spanned by a1, a2."""
    (p1, q1), (p2, q2) = (int(a1[0]), int(a1[1])), (int(a2[0]), int(a2[1]))
    det = p1 * q2 - p2 * q1
    if det == 0:
        raise DegenerateTorusError(f"basis {tuple(a1)}, {tuple(a2)} is degenerate (det = 0)")
    beta, u, v = _xgcd(p1, p2)
    if beta < 0:
        beta, u, v = -beta, -u, -v
    alpha = abs(det) // beta
    gamma = (u * q1 + v * q2) % alpha
    return TwistedTorus(alpha, beta, gamma, (p1, q1), (p2, q2))


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """``(g, u, v)`` with ``u*a + v*b == g == gcd(a, b)`` (g may be negative)."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def reduce_monomial(m, t: TwistedTorus) -> tuple[int, int]:
    """Canonical cell ``(i, j)`` of the translation ``x^ex y^ey`` on ``t``."""
    ex, ey = int(m[0]), int(m[1])
    q, i = divmod(ex, t.beta)
    return i, (ey - q * t.gamma) % t.alpha


def reduce_poly(p: LaurentPoly, t: TwistedTorus) -> LaurentPoly:
    """``p`` with every term moved into the fundamental domain (mod 2 cancellation)."""
    return LaurentPoly.from_terms(reduce_monomial(m, t) for m in p.terms)


def enumerate_decompositions(n: int) -> list[TwistedTorus]:
    """Tori ``a1 = (0, m)``, ``a2 = (l, q)`` with ``2 l m = n`` and ``0 <= q < m``."""
    if n < 2 or n % 2:
        raise ValueError(f"qubit count must be even and >= 2, got {n}")
    half = n // 2
    seen: dict[tuple[int, int, int], TwistedTorus] = {}
    for m in range(1, half + 1):
        if half % m:
            continue
        l = half // m
        for q in range(m):
            t = canonicalize_torus((0, m), (l, q))
            if t.triple in seen:
                log.info("duplicate torus %s ~ %s", t, seen[t.triple])
                continue
            seen[t.triple] = t
    return list(seen.values())


def lattice_vectors(t: TwistedTorus) -> tuple[tuple[int, int], tuple[int, int]]:
    """Lagrange-reduced basis of the period lattice."""
    u = np.array([0, t.alpha], dtype=np.int64)
    v = np.array([t.beta, t.gamma], dtype=np.int64)
    if u @ u > v @ v:
        u, v = v, u
    while True:
        mu = round((u @ v) / (u @ u))
        v = v - mu * u
        if v @ v >= u @ u:
            break
        u, v = v, u
    return (int(u[0]), int(u[1])), (int(v[0]), int(v[1]))


def unimodular_normalize(
    f: LaurentPoly, pivot: tuple[int, int] | None = None
) -> tuple[LaurentPoly, np.ndarray]:
    """Rewrite ``f`` so that a primitive term ``x^a y^b`` becomes ``x'``.

    Returns the new polynomial and the integer matrix ``U`` (det +-1) that
    maps old exponent vectors to new ones: ``e' = U @ e``. The new variables
    are ``x' = x^a y^b`` and ``y' = x^a' y^b'`` with ``a b' - b a' = 1``.
    """
    terms = [(m.ex, m.ey) for m in f.terms]
    if (0, 0) not in terms:
        raise ValueError("polynomial must contain the constant term")
    if pivot is None:
        candidates = [t for t in terms if t != (0, 0) and math.gcd(*t) == 1]
        if not candidates:
            raise NoPrimitiveTermError(f"no primitive exponent pair in {f}")
        # prefer an existing x, then the smallest exponent vector
        pivot = (1, 0) if (1, 0) in candidates else min(candidates, key=lambda t: (abs(t[0]) + abs(t[1]), t))
    a, b = pivot
    if math.gcd(a, b) != 1:
        raise NoPrimitiveTermError(f"pivot {pivot} is not primitive")
    g, u, v = _xgcd(a, b)  # u a + v b = g = +-1
    if g < 0:
        u, v = -u, -v
    # B has columns (a, b) and (a', b') = (-v, u): det = a u + b v = 1
    basis = np.array([[a, -v], [b, u]], dtype=np.int64)
    inv = np.array([[u, v], [-b, a]], dtype=np.int64)
    assert (basis @ inv == np.eye(2, dtype=np.int64)).all()
    new = LaurentPoly.from_terms(tuple(int(c) for c in inv @ np.array(t)) for t in terms)
    return new, inv


def transform_torus(t: TwistedTorus, matrix: np.ndarray) -> TwistedTorus:
    """Image of the period lattice under the exponent map ``e -> matrix @ e``."""
    a1 = matrix @ np.array(t.a1)
    a2 = matrix @ np.array(t.a2)
    return canonicalize_torus(tuple(int(c) for c in a1), tuple(int(c) for c in a2))


__all__ = [
    "DegenerateTorusError",
    "Monomial",
    "NoPrimitiveTermError",
    "TwistedTorus",
    "canonicalize_torus",
    "enumerate_decompositions",
    "lattice_vectors",
    "reduce_monomial",
    "reduce_poly",
    "transform_torus",
    "unimodular_normalize",
]

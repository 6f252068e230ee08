"""Laurent polynomials over GF(2), Buchberger bases and quotient dimensions.

Two polynomial representations live here:

* :class:`LaurentPoly` -- bivariate, integer (possibly negative) exponents,
  the user-facing type for stabilizer patterns ``f(x, y)``.
* plain ``frozenset`` of nonnegative exponent tuples -- the ordinary
  polynomial ring used inside :func:`buchberger`.

Coefficients are always GF(2), so a polynomial is just its set of terms and
addition is symmetric difference.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

INFINITE = math.inf

Term = tuple  # exponent tuple of an ordinary polynomial
Poly = frozenset  # frozenset[Term]


class Monomial(NamedTuple):
    ex: int
    ey: int

    def __str__(self) -> str:
        return _monomial_str(self.ex, self.ey)


def _power(var: str, e: int) -> str:
    return var if e == 1 else f"{var}^{e}"


def _monomial_str(ex: int, ey: int) -> str:
    parts = [_power(v, e) for v, e in (("x", ex), ("y", ey)) if e]
    return "*".join(parts) if parts else "1"


class PolySyntaxError(ValueError):
    """Malformed polynomial text; ``offset`` is the byte offset of the error."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


@dataclass(frozen=True)
class LaurentPoly:
    """Bivariate Laurent polynomial over GF(2), stored as sorted terms."""

    terms: tuple[Monomial, ...] = ()

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[int, int]]) -> "LaurentPoly":
        acc: set[tuple[int, int]] = set()
        for t in terms:
            acc ^= {(int(t[0]), int(t[1]))}
        return cls(tuple(Monomial(*t) for t in sorted(acc)))

    @classmethod
    def one(cls) -> "LaurentPoly":
        return cls((Monomial(0, 0),))

    def term_set(self) -> frozenset[tuple[int, int]]:
        return frozenset((m.ex, m.ey) for m in self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        return poly_add(self, other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        return poly_mul(self, other)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(str(m) for m in self.terms)

    def compact(self) -> str:
        return str(self).replace(" ", "")

    def antipode(self) -> "LaurentPoly":
        return antipode(self)

    def shift(self, dx: int, dy: int) -> "LaurentPoly":
        return LaurentPoly.from_terms((m.ex + dx, m.ey + dy) for m in self.terms)

    def min_exponents(self) -> tuple[int, int]:
        return min(m.ex for m in self.terms), min(m.ey for m in self.terms)


# ----------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<var>[xy])|(?P<op>[+*^\-]))")


def parse_poly(text: str) -> LaurentPoly:
    """Parse ``1 + x + y + y^-1`` style text. Repeated terms cancel mod 2."""
    tokens: list[tuple[str, str, int]] = []
    pos = 0
    raw = text.encode()
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise PolySyntaxError(f"unexpected character {text[pos]!r}", len(text[:pos].encode()))
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), len(text[:start].encode())))
        pos = m.end()
    end = len(raw)
    if not tokens:
        raise PolySyntaxError("empty polynomial", 0)
    if len(tokens) == 1 and tokens[0][:2] == ("num", "0"):
        return LaurentPoly()

    i = 0

    def peek():
        return tokens[i] if i < len(tokens) else ("eof", "", end)

    def take(kind: str, value: str | None = None):
        nonlocal i
        tok = peek()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value or kind
            raise PolySyntaxError(f"expected {want!r}, found {tok[1] or 'end of input'!r}", tok[2])
        i += 1
        return tok

    def exponent() -> int:
        sign = 1
        tok = peek()
        if tok[0] == "op" and tok[1] == "-":
            take("op", "-")
            sign = -1
        tok = peek()
        if tok[0] != "num":
            raise PolySyntaxError("exponent must be an integer", tok[2])
        take("num")
        return sign * int(tok[1])

    def factor() -> tuple[int, int]:
        tok = peek()
        if tok[0] == "num":
            if tok[1] != "1":
                raise PolySyntaxError(f"only the constant 1 is allowed, found {tok[1]!r}", tok[2])
            take("num")
            return 0, 0
        if tok[0] == "var":
            take("var")
            e = 1
            if peek()[:2] == ("op", "^"):
                take("op", "^")
                e = exponent()
            return (e, 0) if tok[1] == "x" else (0, e)
        raise PolySyntaxError(f"expected a factor, found {tok[1] or 'end of input'!r}", tok[2])

    terms: list[tuple[int, int]] = []
    while True:
        ex, ey = factor()
        while peek()[:2] == ("op", "*"):
            take("op", "*")
            dx, dy = factor()
            ex, ey = ex + dx, ey + dy
        terms.append((ex, ey))
        if peek()[:2] == ("op", "+"):
            take("op", "+")
            continue
        break
    if i != len(tokens):
        tok = peek()
        raise PolySyntaxError(f"unexpected {tok[1]!r}", tok[2])
    return LaurentPoly.from_terms(terms)


# ----------------------------------------------------------------------------
# ring operations


def antipode(p: LaurentPoly) -> LaurentPoly:
    return LaurentPoly.from_terms((-m.ex, -m.ey) for m in p.terms)


def poly_add(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    return LaurentPoly.from_terms(sorted(p.term_set() ^ q.term_set()))


def poly_mul(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    return LaurentPoly.from_terms(
        (a.ex + b.ex, a.ey + b.ey) for a in p.terms for b in q.terms
    )


def monomial_poly(ex: int, ey: int) -> LaurentPoly:
    return LaurentPoly((Monomial(ex, ey),))


# ----------------------------------------------------------------------------
# ordinary polynomials and monomial orders


@dataclass(frozen=True)
class MonomialOrder:
    """Lexicographic order; ``precedence`` lists variable indices, largest first."""

    precedence: tuple[int, ...]
    kind: str = "lex"

    def key(self, term: Term) -> tuple:
        ranked = tuple(term[i] for i in self.precedence)
        if self.kind == "lex":
            return ranked
        if self.kind == "grevlex":
            return (sum(term),) + tuple(-e for e in reversed(ranked))
        raise ValueError(f"unknown monomial order {self.kind!r}")

    @classmethod
    def lex(cls, *precedence: int) -> "MonomialOrder":
        return cls(tuple(precedence), "lex")


def leading_term(p: Poly, order: MonomialOrder) -> Term:
    return max(p, key=order.key)


def _divides(a: Term, b: Term) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _shift(p: Iterable[Term], by: Term) -> set[Term]:
    return {tuple(x + y for x, y in zip(t, by)) for t in p}


def _lcm(a: Term, b: Term) -> Term:
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub(a: Term, b: Term) -> Term:
    return tuple(x - y for x, y in zip(a, b))


def s_polynomial(p: Poly, q: Poly, order: MonomialOrder) -> Poly:
    lp, lq = leading_term(p, order), leading_term(q, order)
    m = _lcm(lp, lq)
    return frozenset(_shift(p, _sub(m, lp)) ^ _shift(q, _sub(m, lq)))


def normal_form(p: Iterable[Term], basis: Sequence[Poly], order: MonomialOrder) -> Poly:
    """Full reduction of ``p`` modulo ``basis`` (remainder of multivariate division)."""
    leads = [leading_term(g, order) for g in basis]
    rest = set(p)
    done: set[Term] = set()
    while rest:
        t = max(rest, key=order.key)
        for g, lt in zip(basis, leads):
            if _divides(lt, t):
                rest ^= _shift(g, _sub(t, lt))
                break
        else:
            rest.discard(t)
            done.add(t)
    return frozenset(done)


@dataclass(frozen=True)
class GroebnerBasis:
    generators: tuple[Poly, ...]
    order: MonomialOrder
    names: tuple[str, ...] = field(default=("x", "y"))

    @property
    def leading_terms(self) -> list[Term]:
        return [leading_term(g, self.order) for g in self.generators]

    def format_poly(self, p: Poly) -> str:
        terms = sorted(p, key=self.order.key, reverse=True)
        out = []
        for t in terms:
            parts = [_power(v, e) for v, e in zip(self.names, t) if e]
            out.append("*".join(parts) if parts else "1")
        return " + ".join(out) if out else "0"

    def as_strings(self) -> list[str]:
        return [self.format_poly(g) for g in self.generators]

    def reduce(self, p: Iterable[Term]) -> Poly:
        return normal_form(p, self.generators, self.order)


def _as_term_poly(p) -> Poly:
    if isinstance(p, LaurentPoly):
        if p and min(min(m.ex, m.ey) for m in p.terms) < 0:
            raise ValueError("buchberger needs nonnegative exponents; clear denominators first")
        return frozenset((m.ex, m.ey) for m in p.terms)
    return frozenset(tuple(int(e) for e in t) for t in p)


def buchberger(
    generators: Sequence,
    order: MonomialOrder | None = None,
    names: Sequence[str] | None = None,
) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal spanned by ``generators``.

    Generators are :class:`LaurentPoly` values with nonnegative exponents or
    sets of exponent tuples. The default order is lex with the last variable
    largest (``y > x`` for two variables).
    """
    polys = [g for g in (_as_term_poly(p) for p in generators) if g]
    if not polys:
        raise ValueError("buchberger needs at least one nonzero generator")
    nvars = len(next(iter(polys[0])))
    if order is None:
        order = MonomialOrder.lex(*reversed(range(nvars)))
    if names is None:
        names = ("x", "y") if nvars == 2 else tuple(f"x{i}" for i in range(nvars))

    basis: list[Poly] = []
    for p in polys:
        r = normal_form(p, basis, order)
        if r:
            basis.append(r)
    leads = [leading_term(g, order) for g in basis]
    pairs = [(i, j) for j in range(len(basis)) for i in range(j)]
    while pairs:
        # normal selection strategy: smallest lcm first
        pick = min(range(len(pairs)), key=lambda q: order.key(_lcm(leads[pairs[q][0]], leads[pairs[q][1]])))
        i, j = pairs.pop(pick)
        li, lj = leads[i], leads[j]
        if all(a == 0 or b == 0 for a, b in zip(li, lj)):
            continue  # coprime leading terms: S-polynomial reduces to zero
        r = normal_form(s_polynomial(basis[i], basis[j], order), basis, order)
        if r:
            basis.append(r)
            leads.append(leading_term(r, order))
            new = len(basis) - 1
            pairs.extend((q, new) for q in range(new))
    return GroebnerBasis(tuple(_reduce_basis(basis, order)), order, tuple(names))


def _reduce_basis(basis: list[Poly], order: MonomialOrder) -> list[Poly]:
    leads = [leading_term(g, order) for g in basis]
    keep: list[int] = []
    for i, li in enumerate(leads):
        redundant = any(
            _divides(leads[j], li) and (leads[j] != li or j < i)
            for j in range(len(basis))
            if j != i
        )
        if not redundant:
            keep.append(i)
    minimal = [basis[i] for i in keep]
    reduced = []
    for i, g in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1 :]
        lt = leading_term(g, order)
        tail = normal_form(g - {lt}, others, order)
        reduced.append(frozenset(tail | {lt}))
    return sorted(reduced, key=lambda g: order.key(leading_term(g, order)), reverse=True)


def is_groebner_basis(polys: Sequence[Poly], order: MonomialOrder) -> bool:
    """Buchberger's criterion: every S-polynomial reduces to zero."""
    polys = list(polys)
    return all(
        not normal_form(s_polynomial(p, q, order), polys, order)
        for p, q in itertools.combinations(polys, 2)
    )


def is_reduced(polys: Sequence[Poly], order: MonomialOrder) -> bool:
    leads = [leading_term(g, order) for g in polys]
    for i, g in enumerate(polys):
        for t in g:
            for j, lj in enumerate(leads):
                if j != i and _divides(lj, t):
                    return False
    return True


# ----------------------------------------------------------------------------
# dimension counting


def standard_monomials(gb: GroebnerBasis, limit: int = 2_000_000) -> list[Term] | None:
    """Monomials outside the leading-term ideal, or ``None`` if infinitely many."""
    leads = gb.leading_terms
    nvars = len(leads[0])
    if any(not any(lt) for lt in leads):
        return []  # the ideal contains a unit
    bounds = []
    for v in range(nvars):
        pure = [lt[v] for lt in leads if lt[v] > 0 and all(e == 0 for w, e in enumerate(lt) if w != v)]
        if not pure:
            return None
        bounds.append(min(pure))
    if math.prod(bounds) > limit:
        raise MemoryError(f"staircase box {bounds} exceeds {limit} monomials")
    grid = np.stack(np.meshgrid(*[np.arange(b) for b in bounds], indexing="ij"), axis=-1).reshape(-1, nvars)
    alive = np.ones(len(grid), dtype=bool)
    for lt in leads:
        alive &= ~(grid >= np.asarray(lt)).all(axis=1)
    return [tuple(int(e) for e in t) for t in grid[alive]]


def staircase_dimension(gb: GroebnerBasis) -> float | int:
    """Number of standard monomials; :data:`INFINITE` when not zero-dimensional."""
    std = standard_monomials(gb)
    return INFINITE if std is None else len(std)


def _cleared(p: LaurentPoly) -> Poly:
    mx, my = p.min_exponents()
    return frozenset((m.ex - mx, m.ey - my, 0) for m in p.terms)


LAURENT_ORDER = MonomialOrder.lex(2, 0, 1)  # u > x > y


def laurent_groebner(
    polys: Sequence[LaurentPoly], order: MonomialOrder = LAURENT_ORDER
) -> GroebnerBasis:
    """Basis of the Laurent ideal, realised in ``Z2[x, y, u] / (x*y*u + 1)``."""
    if any(not p for p in polys):
        raise ValueError("generators must be nonzero")
    gens = [_cleared(p) for p in polys] + [frozenset({(1, 1, 1), (0, 0, 0)})]
    return buchberger(gens, order, names=("x", "y", "u"))


def laurent_quotient_dim(
    f: LaurentPoly, g: LaurentPoly, order: MonomialOrder = LAURENT_ORDER
) -> float | int:
    """``dim Z2[x^+-1, y^+-1] / <f, g>``; :data:`INFINITE` if f, g share a factor."""
    return staircase_dimension(laurent_groebner([f, g], order))


def torus_quotient_dim(f: LaurentPoly, g: LaurentPoly, alpha: int, beta: int, gamma: int) -> int:
    """``dim R / <f, g, y^alpha - 1, x^beta y^gamma - 1>`` via Buchberger.

    The boundary relations already make ``x`` and ``y`` units, so no
    auxiliary variable is needed. Exponents of ``f`` and ``g`` are first
    reduced to nonnegative values using the torus periods.
    """
    gens = [_torus_cleared(p, alpha, beta, gamma) for p in (f, g)]
    gens += [
        frozenset({(0, alpha), (0, 0)}),
        frozenset({(beta, gamma % alpha), (0, 0)}),
    ]
    gb = buchberger([p for p in gens if p], MonomialOrder.lex(0, 1), names=("x", "y"))
    dim = staircase_dimension(gb)
    assert dim != INFINITE
    return int(dim)


def _torus_cleared(p: LaurentPoly, alpha: int, beta: int, gamma: int) -> Poly:
    acc: set[Term] = set()
    g = gamma % alpha
    for m in p.terms:
        q, i = divmod(m.ex, beta)
        j = (m.ey - q * g) % alpha
        acc ^= {(i, j)}
    return frozenset(acc)

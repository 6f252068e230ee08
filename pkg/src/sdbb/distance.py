"""Minimum distance of CSS codes.

The exact solver treats the 0-1 program

    minimise  sum(v)   subject to  H v = 0 (mod 2),  L v != 0 (mod 2)

by branching over information sets of ``ker H`` (Brouwer-Zimmermann):
every branch fixes the information bits of a candidate, Gaussian
elimination fixes the rest, and the proven lower bound after exhausting
all branches of information weight ``<= t`` is
``sum_j max(0, t + 1 - (K - r_j))`` over the systematic generator
matrices ``j`` (``r_j`` = new pivots contributed by matrix ``j``). The
search stops once that bound meets the incumbent.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from sdbb import gf2, kernels
from sdbb._accel import backend
from sdbb.codebuilder import CssCode, LogicalBasis, logical_basis

log = logging.getLogger(__name__)

EXACT = "EXACT"
UPPER_BOUND = "UPPER_BOUND"
BRUTE = "BRUTE"
ILP = "ILP"
RANDOMIZED = "RANDOMIZED"


@dataclass
class DistanceResult:
    d: int
    witness: np.ndarray
    status: str
    method: str
    lower_bound: int = 0
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "status": self.status,
            "method": self.method,
            "lower_bound": self.lower_bound,
            "witness": [int(i) for i in np.flatnonzero(self.witness)],
            "stats": self.stats,
        }


@dataclass
class _Sector:
    checks: np.ndarray
    logicals: np.ndarray
    generator: np.ndarray  # packed, augmented with logical syndromes
    n: int
    words: int


def _sector(code: CssCode, basis: LogicalBasis, sector: str) -> _Sector:
    if sector == "z":
        checks, logicals = code.h_x, basis.l_x
    elif sector == "x":
        checks, logicals = code.h_z, basis.l_z
    else:
        raise ValueError(f"sector must be 'x' or 'z', got {sector!r}")
    kern = gf2.nullspace(checks)
    synd = gf2.matmul(kern, logicals.T)
    words = kernels.n_words(code.n)
    gen = kernels.pack_rows(kern, extra_words=1)
    gen[:, words] = kernels.pack_int_rows(synd)
    return _Sector(checks, logicals, gen, code.n, words)


def _sectors_for(code: CssCode, sector: str | None) -> list[str]:
    if sector is not None:
        return [sector]
    return ["z"] if code.self_dual else ["z", "x"]


def _check_witness(sec: _Sector, v: np.ndarray, d: int) -> None:
    if gf2.matmul(sec.checks, v).any():
        raise AssertionError("witness violates a check")
    if not gf2.matmul(sec.logicals, v).any():
        raise AssertionError("witness is a stabilizer")
    if int(v.sum()) != d:
        raise AssertionError("witness weight disagrees with d")


def _require_logicals(code: CssCode, basis: LogicalBasis | None) -> LogicalBasis:
    basis = logical_basis(code) if basis is None else basis
    if basis.k == 0:
        raise ValueError("code has no logical qubits (k = 0)")
    return basis


# ----------------------------------------------------------------------------
# brute force


def distance_bruteforce(
    code: CssCode, basis: LogicalBasis | None = None, w_max: int | None = None, sector: str | None = None
) -> DistanceResult | None:
    """Scan supports by increasing weight; ``None`` if nothing up to ``w_max``."""
    basis = _require_logicals(code, basis)
    w_max = code.n if w_max is None else w_max
    if w_max < 1:
        raise ValueError("w_max must be >= 1")
    t0 = time.perf_counter()
    best: tuple[int, np.ndarray, _Sector] | None = None
    for name in _sectors_for(code, sector):
        sec = _sector(code, basis, name)
        m_words = kernels.n_words(sec.checks.shape[0])
        cols = kernels.pack_rows(sec.checks.T, extra_words=1)
        cols[:, m_words] = kernels.pack_int_rows(sec.logicals.T)
        limit = w_max if best is None else min(w_max, best[0] - 1)
        for w in range(1, limit + 1):
            support = kernels.first_logical_support(cols, m_words, w)
            if support[0] >= 0:
                v = np.zeros(code.n, dtype=np.uint8)
                v[support] = 1
                best = (w, v, sec)
                break
    if best is None:
        return None
    d, v, sec = best
    _check_witness(sec, v, d)
    stats = {"elapsed": time.perf_counter() - t0, "backend": backend()}
    return DistanceResult(d, v, EXACT, BRUTE, d, stats)


# ----------------------------------------------------------------------------
# randomized information-set sampling


def distance_upper_randomized(
    code: CssCode,
    basis: LogicalBasis | None = None,
    trials: int = 1000,
    seed: int = 0,
    target: int | None = None,
    sector: str | None = None,
    budget: float | None = None,
) -> DistanceResult:
    """Lee-Brickell sampling; stops early at ``target`` or after ``budget`` seconds."""
    basis = _require_logicals(code, basis)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    t0 = time.perf_counter()
    best_w = code.n + 1
    best_word = None
    best_sec = None
    done = 0
    for name in _sectors_for(code, sector):
        sec = _sector(code, basis, name)
        rng = np.random.Generator(np.random.Philox(key=seed))
        for trial in range(trials):
            order = rng.permutation(code.n).astype(np.int64)
            w, word = kernels.isd_trial(sec.generator, sec.words, order, best_w)
            done += 1
            if w < best_w:
                best_w, best_word, best_sec = int(w), word.copy(), sec
                log.debug("trial %d: weight %d", trial, best_w)
            if target is not None and best_w <= target:
                break
            if budget is not None and time.perf_counter() - t0 > budget:
                break
    if best_word is None:
        raise RuntimeError("no nontrivial logical found; is k > 0?")
    v = kernels.unpack_rows(best_word[: best_sec.words], code.n)[0]
    _check_witness(best_sec, v, best_w)
    stats = {"trials": done, "seed": seed, "elapsed": time.perf_counter() - t0, "backend": backend()}
    return DistanceResult(best_w, v, UPPER_BOUND, RANDOMIZED, 1, stats)


# ----------------------------------------------------------------------------
# exact information-set branch and bound


def _information_sets(sec: _Sector) -> list[tuple[np.ndarray, int]]:
    """Systematic generator matrices with their counts of fresh pivots."""
    k = sec.generator.shape[0]
    used = np.zeros(sec.n, dtype=bool)
    out = []
    while not used.all():
        fresh = np.flatnonzero(~used)
        order = np.concatenate([fresh, np.flatnonzero(used)]).astype(np.int64)
        a = sec.generator.copy()
        piv = kernels.rref_packed(a, order)
        piv = piv[piv >= 0]
        assert len(piv) == k
        new = [p for p in piv if not used[p]]
        if not new:
            break
        used[new] = True
        out.append((a, len(new)))
    return out


def _lower_bound(t: int, k: int, ranks: list[int]) -> int:
    return sum(max(0, t + 1 - (k - r)) for r in ranks)


def _scan_level(g: np.ndarray, words: int, t: int, bound: int, stop_at: int, jobs: int):
    """Best combination of exactly ``t`` rows, chunked on the first row."""
    k = g.shape[0]
    zero = np.zeros(g.shape[1], dtype=np.uint64)
    if t == 1:
        w, idx, leaves = kernels.best_combination(g, words, 1, bound, stop_at, zero)
        return int(w), [int(i) for i in idx] if idx[0] >= 0 else None, int(leaves)

    def chunk(i0: int, cur: int):
        w, idx, leaves = kernels.best_combination(g[i0 + 1 :], words, t - 1, cur, stop_at, g[i0])
        sel = [i0] + [i0 + 1 + int(i) for i in idx] if idx[0] >= 0 else None
        return int(w), sel, int(leaves)

    best, best_sel, total = bound, None, 0
    starts = range(k - t + 1)
    if jobs > 1:
        # each chunk sees the bound from before the level; d is unaffected
        with ThreadPoolExecutor(jobs) as pool:
            results = list(pool.map(lambda i: chunk(i, bound), starts))
        for w, sel, leaves in results:
            total += leaves
            if w < best:
                best, best_sel = w, sel
        return best, best_sel, total
    for i0 in starts:
        w, sel, leaves = chunk(i0, best)
        total += leaves
        if w < best:
            best, best_sel = w, sel
            if best <= stop_at:
                break
    return best, best_sel, total


def _exact_sector(sec: _Sector, incumbent: int, witness: np.ndarray, deadline: float | None, jobs: int):
    k = sec.generator.shape[0]
    mats = _information_sets(sec)
    ranks = [r for _, r in mats]
    done = [0] * len(mats)
    best, best_word = incumbent, witness
    nodes = 0
    t = 0
    lb = 0
    while lb < best:
        t += 1
        if t > k:
            break
        for j, (g, r) in enumerate(mats):
            if t < k - r:
                continue
            for level in range(done[j] + 1, t + 1):
                if deadline is not None and time.perf_counter() > deadline:
                    return best, best_word, lb, nodes, False
                w, sel, leaves = _scan_level(g, sec.words, level, best, lb, jobs)
                nodes += leaves
                if sel is not None and w < best:
                    best = w
                    best_word = np.bitwise_xor.reduce(g[sel], axis=0)
                    log.debug("level %d matrix %d: weight %d", level, j, best)
                done[j] = level
        lb = _lower_bound(t, k, ranks)
        log.debug("t=%d lower bound %d incumbent %d", t, lb, best)
    return best, best_word, min(lb, best), nodes, True


def distance_exact(
    code: CssCode,
    basis: LogicalBasis | None = None,
    budget: float | None = None,
    seed: int = 0,
    warm_trials: int = 200,
    sector: str | None = None,
    jobs: int = 1,
) -> DistanceResult:
    """Exact minimum distance (EXACT), or UPPER_BOUND if ``budget`` runs out.

    A short randomized run seeds the incumbent; it only affects speed.
    Self-dual codes are solved in the Z sector alone.
    """
    basis = _require_logicals(code, basis)
    t0 = time.perf_counter()
    deadline = None if budget is None else t0 + budget
    results = []
    for name in _sectors_for(code, sector):
        warm = distance_upper_randomized(code, basis, trials=warm_trials, seed=seed, sector=name)
        sec = _sector(code, basis, name)
        word = kernels.pack_rows(warm.witness[None, :], extra_words=1)[0]
        best, best_word, lb, nodes, complete = _exact_sector(sec, warm.d, word, deadline, jobs)
        v = kernels.unpack_rows(best_word[: sec.words], code.n)[0]
        _check_witness(sec, v, best)
        results.append((best, v, lb, nodes, complete))
    d, v, _, _, _ = min(results, key=lambda r: r[0])
    complete = all(r[4] for r in results)
    lb = min(r[2] for r in results)
    stats = {
        "nodes": int(sum(r[3] for r in results)),
        "elapsed": time.perf_counter() - t0,
        "seed": seed,
        "backend": backend(),
    }
    if complete:
        return DistanceResult(d, v, EXACT, ILP, d, stats)
    return DistanceResult(d, v, UPPER_BOUND, ILP, lb, stats)


def code_distance(code: CssCode, method: str = "exact", **kwargs) -> DistanceResult:
    """Dispatch on ``exact``, ``brute`` or ``randomized``."""
    if method == "exact":
        return distance_exact(code, **kwargs)
    if method == "brute":
        res = distance_bruteforce(code, **kwargs)
        if res is None:
            raise LookupError("no logical operator within the weight cap")
        return res
    if method == "randomized":
        return distance_upper_randomized(code, **kwargs)
    raise ValueError(f"unknown distance method {method!r}")


__all__ = [
    "BRUTE",
    "DistanceResult",
    "EXACT",
    "ILP",
    "RANDOMIZED",
    "UPPER_BOUND",
    "code_distance",
    "distance_bruteforce",
    "distance_exact",
    "distance_upper_randomized",
]

"""Exhaustive weight-8 search over f = 1 + x + x^a y^b + x^c y^d on twisted tori.

Results are appended to a JSON-lines file as they arrive, keyed by
``(n, torus, f)``; a manifest next to it pins the configuration so that an
interrupted sweep can be resumed without mixing settings.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
import math
import multiprocessing
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from sdbb import __version__
from sdbb.codebuilder import build_code, compute_k_quotient, compute_k_rank, doubly_even_check
from sdbb.distance import (
    EXACT,
    DistanceResult,
    distance_bruteforce,
    distance_exact,
    distance_upper_randomized,
)
from sdbb.gf2poly import LaurentPoly, antipode, laurent_quotient_dim, parse_poly
from sdbb.tables import TableRow
from sdbb.torus import (
    TwistedTorus,
    canonicalize_torus,
    enumerate_decompositions,
    lattice_vectors,
    reduce_monomial,
    reduce_poly,
)

log = logging.getLogger(__name__)

LOCALITY_METRIC = "max squared periodic distance between qubits of one check; sublattice offset (1/2, 1/2)"


# ----------------------------------------------------------------------------
# records


@dataclass
class CodeRecord:
    f: LaurentPoly
    torus: TwistedTorus
    n: int
    k: int
    d: int
    locality: Fraction
    distance: DistanceResult

    @property
    def metric(self) -> Fraction:
        return Fraction(self.k * self.d * self.d, self.n)

    @property
    def key(self) -> str:
        return candidate_key(self.f, self.torus)

    @property
    def exact(self) -> bool:
        return self.distance.status == EXACT

    def rank_key(self):
        return (-self.metric, self.locality, str(self.f), self.torus.triple)

    def to_dict(self) -> dict:
        dist = self.distance.to_dict()
        dist["stats"] = {k: v for k, v in dist["stats"].items() if k != "elapsed"}
        return {
            "key": self.key,
            "status": "evaluated",
            "f": str(self.f),
            "a1": list(self.torus.a1),
            "a2": list(self.torus.a2),
            "torus": list(self.torus.triple),
            "n": self.n,
            "k": self.k,
            "d": self.d,
            "metric": str(self.metric),
            "metric_float": round(float(self.metric), 6),
            "locality": str(self.locality),
            "distance": dist,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CodeRecord":
        torus = canonicalize_torus(data["a1"], data["a2"])
        n = data["n"]
        dist = data["distance"]
        witness = np.zeros(n, dtype=np.uint8)
        witness[dist["witness"]] = 1
        res = DistanceResult(dist["d"], witness, dist["status"], dist["method"], dist["lower_bound"], dist["stats"])
        return cls(parse_poly(data["f"]), torus, n, data["k"], data["d"], Fraction(data["locality"]), res)


@dataclass(frozen=True)
class Skipped:
    key: str
    n: int
    k: int
    reason: str = "k below min_k"

    def to_dict(self) -> dict:
        return {"key": self.key, "status": "skipped", "n": self.n, "k": self.k, "reason": self.reason}


def candidate_key(f: LaurentPoly, torus: TwistedTorus) -> str:
    a, b, c = torus.triple
    return f"{2 * torus.n_cells}|{a},{b},{c}|{f}"


def candidate_seed(master: int, key: str) -> int:
    digest = hashlib.blake2b(f"{master}|{key}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


# ----------------------------------------------------------------------------
# configuration


@dataclass
class SearchConfig:
    n_min: int = 16
    n_max: int = 16
    min_k: int = 4
    distance: str = "exact:64,randomized"
    budget: float | None = None
    trials: int = 2000
    seed: int = 0
    exponent_domain: str = "fundamental"
    out: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.exponent_domain != "fundamental":
            raise ValueError("only the 'fundamental' exponent domain is supported")
        self.policy()  # validate early

    def policy(self) -> list[tuple[str, int | None]]:
        """Parse ``method[:max_n],...``; the first rule covering ``n`` applies."""
        rules = []
        for part in self.distance.split(","):
            name, _, cap = part.strip().partition(":")
            if name not in ("exact", "randomized", "brute"):
                raise ValueError(f"unknown distance method {name!r}")
            rules.append((name, int(cap) if cap else None))
        return rules

    def method_for(self, n: int) -> str:
        for name, cap in self.policy():
            if cap is None or n <= cap:
                return name
        raise ValueError(f"no distance rule covers n = {n}")

    def fingerprint(self) -> str:
        """Hash of everything that influences results (not ``out``/``jobs``)."""
        data = {k: v for k, v in asdict(self).items() if k not in ("out", "jobs")}
        return hashlib.sha256(json.dumps(data, sort_keys=True).encode()).hexdigest()[:16]


# ----------------------------------------------------------------------------
# candidates


def enumerate_candidates(n: int) -> Iterator[tuple[LaurentPoly, TwistedTorus]]:
    if n % 2:
        raise ValueError(f"qubit count must be even, got {n}")
    if n < 2:
        return
    for torus in enumerate_decompositions(n):
        origin = (0, 0)
        x = reduce_monomial((1, 0), torus)
        if x == origin:
            continue
        cells = [c for c in torus.cells() if c not in (origin, x)]
        for p, q in itertools.combinations(cells, 2):
            f = LaurentPoly.from_terms([origin, x, p, q])
            yield f, torus


def count_candidates(n: int) -> int:
    return sum(1 for _ in enumerate_candidates(n))


# ----------------------------------------------------------------------------
# locality


def locality_score(f: LaurentPoly, g: LaurentPoly, torus: TwistedTorus) -> Fraction:
    """Max squared distance between two qubits of one check, on the torus.

    Coordinates are doubled internally so the half-cell sublattice offset
    stays integral.
    """
    pts = [(2 * m.ex, 2 * m.ey) for m in reduce_poly(f, torus).terms]
    pts += [(2 * m.ex + 1, 2 * m.ey + 1) for m in reduce_poly(g, torus).terms]
    u, v = lattice_vectors(torus)
    basis = 2 * np.array([u, v], dtype=np.int64)  # rows
    inv = np.linalg.inv(basis.astype(float))
    best = 0
    for p, q in itertools.combinations(pts, 2):
        diff = np.array(p) - np.array(q)
        best = max(best, _shortest_sq(diff, basis, inv))
    return Fraction(best, 4)


def _shortest_sq(diff: np.ndarray, basis: np.ndarray, inv: np.ndarray) -> int:
    base = np.rint(diff @ inv).astype(np.int64)
    best = None
    for c1 in range(-2, 3):
        for c2 in range(-2, 3):
            coef = base + (c1, c2)
            w = diff - coef @ basis
            s = int(w @ w)
            best = s if best is None else min(best, s)
    return best


# ----------------------------------------------------------------------------
# evaluation


def _distance_for(code, cfg: SearchConfig, seed: int) -> DistanceResult:
    method = cfg.method_for(code.n)
    if method == "exact":
        return distance_exact(code, budget=cfg.budget, seed=seed)
    if method == "brute":
        res = distance_bruteforce(code)
        if res is None:
            raise RuntimeError("brute force found no logical operator")
        return res
    res = distance_upper_randomized(code, trials=cfg.trials, seed=seed)
    if cfg.budget:
        exact = distance_exact(code, budget=cfg.budget, seed=seed)
        if exact.d <= res.d:
            return exact
    return res


def evaluate_candidate(f: LaurentPoly, torus: TwistedTorus, config: SearchConfig) -> CodeRecord | Skipped:
    g = antipode(f)
    n = 2 * torus.n_cells
    key = candidate_key(f, torus)
    k = compute_k_quotient(f, g, torus)
    if k < config.min_k or k == 0:
        return Skipped(key, n, k)
    code = build_code(f, torus, g)
    if not doubly_even_check(code).condition_holds:
        raise AssertionError(f"candidate {key} is not doubly even")
    dist = _distance_for(code, config, candidate_seed(config.seed, key))
    return CodeRecord(f, torus, n, k, dist.d, locality_score(f, g, torus), dist)


def _evaluate_job(args):
    f_text, a1, a2, cfg = args
    return evaluate_candidate(parse_poly(f_text), canonicalize_torus(a1, a2), cfg)


# ----------------------------------------------------------------------------
# ranking


def rank_and_select(records: Iterable[CodeRecord]) -> CodeRecord:
    """Highest metric, then most local, then smallest printed f, then torus."""
    records = list(records)
    if not records:
        raise ValueError("no records to rank")
    return min(records, key=CodeRecord.rank_key)


# ----------------------------------------------------------------------------
# driver


@dataclass
class SearchResult:
    winners: dict[int, CodeRecord]
    evaluated: int = 0
    skipped: int = 0
    resumed: int = 0
    elapsed: float = 0.0
    records: dict[int, list[CodeRecord]] = field(default_factory=dict, repr=False)


def _manifest_path(out: Path) -> Path:
    return out.with_name(out.name + ".manifest.json")


def _load_previous(cfg: SearchConfig, out: Path) -> dict[str, dict]:
    manifest = _manifest_path(out)
    if not out.exists():
        return {}
    if manifest.exists():
        meta = json.loads(manifest.read_text())
        if meta.get("config_hash") != cfg.fingerprint():
            raise ValueError(f"{out} was written with a different configuration; refusing to resume")
    done = {}
    with out.open() as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError:
                log.warning("ignoring truncated line in %s", out)
                continue
            done[row["key"]] = row
    return done


def _write_manifest(cfg: SearchConfig, out: Path, complete: bool) -> None:
    meta = {
        "config": asdict(cfg),
        "config_hash": cfg.fingerprint(),
        "seed": cfg.seed,
        "version": __version__,
        "locality_metric": LOCALITY_METRIC,
        "complete": complete,
    }
    _manifest_path(out).write_text(json.dumps(meta, indent=1, sort_keys=True))


def run_search(config: SearchConfig) -> SearchResult:
    """Evaluate every candidate for each even n in range and pick winners."""
    t0 = time.perf_counter()
    out = Path(config.out) if config.out else None
    done = _load_previous(config, out) if out else {}
    if out:
        out.parent.mkdir(parents=True, exist_ok=True)
        _write_manifest(config, out, complete=False)
    result = SearchResult({})
    ns = [n for n in range(config.n_min, config.n_max + 1) if n % 2 == 0]
    fh = out.open("a") if out else None
    pool = None
    if config.jobs > 1:
        pool = multiprocessing.get_context("spawn").Pool(config.jobs)
    try:
        for n in ns:
            recs: list[CodeRecord] = []
            todo = []
            for f, torus in enumerate_candidates(n):
                key = candidate_key(f, torus)
                if key in done:
                    result.resumed += 1
                    if done[key]["status"] == "evaluated":
                        recs.append(CodeRecord.from_dict(done[key]))
                    continue
                todo.append((str(f), torus.a1, torus.a2, config))
            if pool is not None:
                results = pool.imap(_evaluate_job, todo, chunksize=max(1, len(todo) // (8 * config.jobs)))
            else:
                results = map(_evaluate_job, todo)
            for item in results:
                if isinstance(item, Skipped):
                    result.skipped += 1
                else:
                    result.evaluated += 1
                    recs.append(item)
                if fh:
                    fh.write(json.dumps(item.to_dict(), sort_keys=True) + "\n")
            if fh:
                fh.flush()
            result.records[n] = recs
            if recs:
                result.winners[n] = rank_and_select(recs)
                w = result.winners[n]
                log.info("n=%d winner [[%d,%d,%d]] f=%s metric=%s", n, w.n, w.k, w.d, w.f, w.metric)
            else:
                log.info("n=%d: no candidate with k >= %d", n, config.min_k)
    finally:
        if pool is not None:
            pool.close()
            pool.join()
        if fh:
            fh.close()
    if out:
        _write_manifest(config, out, complete=True)
    result.elapsed = time.perf_counter() - t0
    return result


# ----------------------------------------------------------------------------
# closed-form checks


def theorem1_torus(a: int, b: int, c: int, d: int) -> TwistedTorus:
    return canonicalize_torus((3 * a, 3 * b), (c + a, d + b))


def verify_theorem1(a: int, b: int, c: int, d: int) -> dict:
    """Compare 4|ad - bc| with the maximal and the torus logical dimension
    of the weight-6 code ``f = 1 + x^a y^b + x^c y^d``."""
    delta = a * d - b * c
    if delta == 0:
        raise ValueError(f"ad - bc = 0 for {(a, b, c, d)}: the ideal is not zero-dimensional")
    f = LaurentPoly.from_terms([(0, 0), (a, b), (c, d)])
    g = antipode(f)
    dim = laurent_quotient_dim(f, g)
    torus = theorem1_torus(a, b, c, d)
    k_torus = compute_k_quotient(f, g, torus)
    predicted = 4 * abs(delta)
    computed = 2 * dim if dim != math.inf else math.inf
    return {
        "abcd": [a, b, c, d],
        "delta": delta,
        "k_max_predicted": predicted,
        "k_max_computed": computed,
        "torus_used": {"a1": list(torus.a1), "a2": list(torus.a2), "canonical": list(torus.triple)},
        "n_on_torus": torus.n_qubits,
        "k_on_torus": k_torus,
        "holds": computed == predicted == k_torus,
    }


def theorem1_sweep(bound: int = 3) -> list[dict]:
    rng = range(-bound, bound + 1)
    return [verify_theorem1(*t) for t in itertools.product(rng, repeat=4) if t[0] * t[3] != t[1] * t[2]]


# ----------------------------------------------------------------------------
# golden tables


@dataclass
class RowCheck:
    row: TableRow
    k_rank: int
    k_quotient: int
    d: int | None
    d_status: str | None
    d_method: str | None
    lower_bound: int | None
    failures: list[str]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "label": self.row.label,
            "table": self.row.table,
            "f": self.row.f,
            "a1": list(self.row.a1),
            "a2": list(self.row.a2),
            "k_expected": self.row.k,
            "k_rank": self.k_rank,
            "k_quotient": self.k_quotient,
            "d_expected": self.row.d,
            "d": self.d,
            "d_status": self.d_status,
            "d_method": self.d_method,
            "lower_bound": self.lower_bound,
            "metric": str(Fraction(self.row.k * self.row.d**2, self.row.n)),
            "printed_metric": self.row.printed_metric,
            "passed": self.passed,
            "failures": self.failures,
        }


def reproduce_table(
    rows: Iterable[TableRow],
    distance: str = "exact:100,randomized",
    budget: float | None = None,
    trials: int = 5000,
    seed: int = 2025,
    with_distance: bool = True,
) -> list[RowCheck]:
    """Recompute k (both routes) and d for each golden row and diff them.

    ``distance`` follows the sweep policy syntax. Randomized runs stop once
    they reach the printed d; the result is then an upper bound that meets
    the table value. Budget-exhausted exact runs fall back to the bound
    pair and are reported with status UPPER_BOUND.
    """
    cfg = SearchConfig(distance=distance, budget=budget, trials=trials, seed=seed)
    out = []
    for row in rows:
        code = build_code(parse_poly(row.f), canonicalize_torus(row.a1, row.a2))
        failures = []
        if code.n != row.n:
            failures.append(f"n: expected {row.n}, got {code.n}")
        k_rank = compute_k_rank(code)
        k_quot = compute_k_quotient(code.f, code.g, code.torus)
        for name, val in (("k_rank", k_rank), ("k_quotient", k_quot)):
            if val != row.k:
                failures.append(f"{name}: expected {row.k}, got {val}")
        d = status = method = lb = None
        if with_distance and k_rank > 0:
            rule = cfg.method_for(code.n)
            if rule == "randomized":
                res = distance_upper_randomized(code, trials=trials, seed=seed, target=row.d, budget=budget)
            elif rule == "brute":
                res = distance_bruteforce(code)
            else:
                res = distance_exact(code, budget=budget, seed=seed)
            d, status, method, lb = res.d, res.status, res.method, res.lower_bound
            if d != row.d:
                failures.append(f"d: expected {row.d}, got {d} ({status})")
        out.append(RowCheck(row, k_rank, k_quot, d, status, method, lb, failures))
    return out


__all__ = [
    "CodeRecord",
    "LOCALITY_METRIC",
    "RowCheck",
    "SearchConfig",
    "SearchResult",
    "Skipped",
    "candidate_key",
    "candidate_seed",
    "count_candidates",
    "enumerate_candidates",
    "evaluate_candidate",
    "locality_score",
    "rank_and_select",
    "reproduce_table",
    "run_search",
    "theorem1_sweep",
    "theorem1_torus",
    "verify_theorem1",
]

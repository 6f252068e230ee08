import itertools
import json
from fractions import Fraction
from math import comb

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from sdbb.gf2poly import LaurentPoly, antipode, parse_poly
from sdbb.search import (
    CodeRecord,
    SearchConfig,
    Skipped,
    candidate_key,
    candidate_seed,
    count_candidates,
    enumerate_candidates,
    evaluate_candidate,
    locality_score,
    rank_and_select,
    reproduce_table,
    run_search,
    theorem1_sweep,
    verify_theorem1,
)
from sdbb.tables import row_by_n
from sdbb.torus import canonicalize_torus, enumerate_decompositions, reduce_poly

# --- candidate stream ----------------------------------------------------------


def _in_lattice(v, a1, a2):
    det = a1[0] * a2[1] - a1[1] * a2[0]
    return (v[0] * a2[1] - v[1] * a2[0]) % det == 0 and (a1[0] * v[1] - a1[1] * v[0]) % det == 0


@pytest.mark.parametrize("n", [2, 4, 8, 16, 24, 30])
def test_candidate_count_formula(n):
    cells = n // 2
    want = sum(comb(cells - 2, 2) for t in enumerate_decompositions(n) if not _in_lattice((1, 0), t.a1, t.a2))
    assert count_candidates(n) == want
    keys = [candidate_key(f, t) for f, t in enumerate_candidates(n)]
    assert len(keys) == len(set(keys))
    assert all(len(f) == 4 for f, _ in enumerate_candidates(n))


def test_candidate_count_n16():
    assert count_candidates(16) == 210
    with pytest.raises(ValueError):
        list(enumerate_candidates(15))


def test_stream_contains_table_code():
    target = canonicalize_torus((0, 4), (2, 2)).triple
    want = LaurentPoly.from_terms([(0, 0), (1, 0), (0, 1), (0, 3)]).term_set()
    assert any(t.triple == target and f.term_set() == want for f, t in enumerate_candidates(16))


# --- locality -------------------------------------------------------------------


def oracle_locality(f, g, a1, a2):
    pts = [(m.ex, m.ey) for m in f.terms] + [(m.ex + 0.5, m.ey + 0.5) for m in g.terms]
    best = 0.0
    for p, q in itertools.combinations(pts, 2):
        dx, dy = p[0] - q[0], p[1] - q[1]
        d2 = min(
            (dx + i * a1[0] + j * a2[0]) ** 2 + (dy + i * a1[1] + j * a2[1]) ** 2
            for i in range(-25, 26)
            for j in range(-25, 26)
        )
        best = max(best, d2)
    return Fraction(best).limit_denominator(4)


exps = st.tuples(st.integers(-3, 3), st.integers(-3, 3))
polys = st.sets(exps, min_size=1, max_size=3).map(lambda s: LaurentPoly.from_terms(s | {(0, 0)}))
lattices = st.tuples(st.integers(1, 6), st.integers(-5, 5), st.integers(1, 6)).map(lambda t: ((t[0], t[1]), (0, t[2])))


@settings(max_examples=60)
@given(polys, lattices)
def test_locality_matches_brute_force(f, lattice):
    torus = canonicalize_torus(*lattice)
    # colliding terms cancel on the torus; the oracle does not model that
    assume(len({(m.ex, m.ey) for m in reduce_poly(f, torus).terms}) == len(f))
    assert locality_score(f, antipode(f), torus) == oracle_locality(f, antipode(f), *lattice)


def test_locality_single_term():
    f = parse_poly("1")
    assert locality_score(f, f, canonicalize_torus((0, 10), (10, 0))) == Fraction(1, 2)


# --- evaluation -----------------------------------------------------------------


def test_evaluate_table_codes():
    cfg = SearchConfig()
    rec = evaluate_candidate(parse_poly("1 + x + y + y^-1"), canonicalize_torus((0, 4), (2, 2)), cfg)
    assert (rec.n, rec.k, rec.d, rec.metric) == (16, 4, 4, 4)
    assert rec.exact
    rec = evaluate_candidate(parse_poly("1 + x + x^2*y + x^-1*y"), canonicalize_torus((0, 7), (4, 3)), cfg)
    assert (rec.n, rec.k, rec.d, rec.metric) == (56, 6, 8, Fraction(48, 7))
    back = CodeRecord.from_dict(json.loads(json.dumps(rec.to_dict())))
    assert back.to_dict() == rec.to_dict()


def test_evaluate_skips_small_k():
    out = evaluate_candidate(parse_poly("1 + x + y + y^-1"), canonicalize_torus((0, 4), (2, 2)), SearchConfig(min_k=6))
    assert isinstance(out, Skipped) and out.k == 4


def _fake(f, metric_k, d, n, loc):
    rec = evaluate_candidate(parse_poly("1 + x + y + y^-1"), canonicalize_torus((0, 4), (2, 2)), SearchConfig())
    return CodeRecord(parse_poly(f), rec.torus, n, metric_k, d, Fraction(loc), rec.distance)


def test_rank_ties():
    a = _fake("1 + x + y", 4, 4, 16, 5)
    b = _fake("1 + x + y^2", 4, 4, 16, 4)
    c = _fake("1 + x + x*y", 4, 4, 16, 4)
    d = _fake("1 + y", 2, 4, 16, 1)
    # metric ties, then locality, then the printed polynomial
    assert rank_and_select([a, b, c, d]) is c
    assert rank_and_select([a, b, d]) is b
    assert rank_and_select([a, d]) is a
    with pytest.raises(ValueError):
        rank_and_select([])


def test_config_policy():
    cfg = SearchConfig(distance="brute:20,exact:64,randomized")
    assert [cfg.method_for(n) for n in (16, 40, 200)] == ["brute", "exact", "randomized"]
    with pytest.raises(ValueError):
        SearchConfig(distance="guess")
    with pytest.raises(ValueError):
        SearchConfig(distance="exact:10").method_for(12)
    with pytest.raises(ValueError):
        SearchConfig(exponent_domain="box")
    assert SearchConfig(out="a", jobs=4).fingerprint() == SearchConfig().fingerprint()
    assert SearchConfig(seed=1).fingerprint() != SearchConfig().fingerprint()
    assert candidate_seed(0, "k") == candidate_seed(0, "k") != candidate_seed(1, "k")


# --- driver ------------------------------------------------------------------


def test_search_n16_resume_and_manifest(tmp_path):
    out = tmp_path / "s.jsonl"
    cfg = SearchConfig(out=str(out))
    first = run_search(cfg)
    w = first.winners[16]
    assert (w.n, w.k, w.d, w.metric, w.locality) == (16, 4, 4, 4, 4)
    assert first.evaluated + first.skipped == 210 and first.resumed == 0
    meta = json.loads((tmp_path / "s.jsonl.manifest.json").read_text())
    assert meta["complete"] and meta["config_hash"] == cfg.fingerprint()

    with out.open("a") as fh:
        fh.write('{"key": "trunc')  # interrupted write
    again = run_search(cfg)
    assert again.resumed == 210 and again.evaluated == 0
    assert again.winners[16].to_dict() == w.to_dict()
    with pytest.raises(ValueError):
        run_search(SearchConfig(out=str(out), seed=5))


def test_parallel_matches_serial():
    serial = run_search(SearchConfig(n_min=16, n_max=18))
    parallel = run_search(SearchConfig(n_min=16, n_max=18, jobs=2))
    assert serial.winners.keys() == parallel.winners.keys()
    for n in serial.winners:
        assert serial.winners[n].to_dict() == parallel.winners[n].to_dict()


# --- closed form -----------------------------------------------------------


@pytest.mark.parametrize("abcd, k", [((1, 0, 0, 1), 4), ((2, 0, 0, 1), 8), ((1, 2, 3, 1), 20)])
def test_theorem1_examples(abcd, k):
    rep = verify_theorem1(*abcd)
    assert rep["holds"]
    assert rep["k_max_predicted"] == rep["k_max_computed"] == rep["k_on_torus"] == k


def test_theorem1_degenerate():
    with pytest.raises(ValueError):
        verify_theorem1(1, 2, 2, 4)


def test_theorem1_small_sweep():
    reps = theorem1_sweep(bound=1)
    assert len(reps) == sum(1 for t in itertools.product(range(-1, 2), repeat=4) if t[0] * t[3] != t[1] * t[2])
    assert all(r["holds"] for r in reps)


def test_reproduce_rows():
    checks = reproduce_table([row_by_n(64), row_by_n(120)])
    assert [c.passed for c in checks] == [True, True]
    assert checks[0].d_method == "ILP" and checks[0].d_status == "EXACT"
    assert checks[1].d_method == "RANDOMIZED" and checks[1].d == row_by_n(120).d
    bad = reproduce_table([row_by_n(16)], with_distance=False)
    assert bad[0].passed and bad[0].d is None

"""``sdbb`` command line.

Every command prints one JSON envelope (``--format json``, the default) or a
short human-readable table (``--format table``) on stdout. Logs go to stderr.

Exit codes: 0 ok, 2 bad input, 3 degenerate torus, 4 ideal not
zero-dimensional, 5 table mismatch, 6 exact distance downgraded to a bound.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from fractions import Fraction

from sdbb import __version__
from sdbb.codebuilder import build_code, compute_k_rank, doubly_even_check
from sdbb.distance import UPPER_BOUND, code_distance
from sdbb.gf2poly import (
    INFINITE,
    MonomialOrder,
    PolySyntaxError,
    buchberger,
    laurent_groebner,
    parse_poly,
    staircase_dimension,
    standard_monomials,
)
from sdbb.logicalgates import gate_report
from sdbb.search import SearchConfig, reproduce_table, run_search, verify_theorem1
from sdbb.tables import rows_for
from sdbb.torus import DegenerateTorusError, canonicalize_torus

log = logging.getLogger("sdbb")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3
EXIT_NOT_ZERO_DIM = 4
EXIT_TABLE_DIFF = 5
EXIT_DOWNGRADED = 6


class CommandError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _vector(text: str) -> tuple[int, int]:
    try:
        a, b = (int(p) for p in text.replace("(", "").replace(")", "").split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'p,q', got {text!r}") from None
    return a, b


def _int_list(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _strip_elapsed(obj):
    if isinstance(obj, dict):
        return {k: _strip_elapsed(v) for k, v in obj.items() if k != "elapsed"}
    if isinstance(obj, list):
        return [_strip_elapsed(v) for v in obj]
    return obj


def _json_default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float) and math.isinf(obj):
        return "INFINITE"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _fmt_dim(d):
    return "INFINITE" if d == INFINITE else d


def _build(args):
    try:
        f = parse_poly(args.f)
        g = parse_poly(args.g) if getattr(args, "g", None) else None
    except PolySyntaxError as exc:
        raise CommandError(str(exc), EXIT_INPUT) from exc
    try:
        torus = canonicalize_torus(args.a1, args.a2)
    except DegenerateTorusError as exc:
        raise CommandError(str(exc), EXIT_DEGENERATE) from exc
    if not f:
        raise CommandError("f must be nonzero", EXIT_INPUT)
    return build_code(f, torus, g)


# ----------------------------------------------------------------------------
# commands; each returns (payload, exit code, table lines)


def cmd_params(args):
    code = _build(args)
    k = compute_k_rank(code)
    de = doubly_even_check(code)
    payload = {
        "f": str(code.f),
        "g": str(code.g),
        "torus": {"a1": list(code.torus.a1), "a2": list(code.torus.a2), "canonical": list(code.torus.triple)},
        "n": code.n,
        "k": k,
        "self_dual": code.self_dual,
        "doubly_even": de.condition_holds,
    }
    status = EXIT_OK
    if args.with_distance and k > 0:
        res = code_distance(code, "exact", budget=args.budget, seed=args.seed, jobs=args.jobs)
        payload.update(d=res.d, distance_status=res.status, lower_bound=res.lower_bound)
        payload["metric"] = str(Fraction(k * res.d**2, code.n))
        if res.status == UPPER_BOUND:
            status = EXIT_DOWNGRADED
    label = f"[[{code.n},{k},{payload.get('d', '?')}]]"
    lines = [f"{label}  f={code.f}  torus={code.torus}  self_dual={code.self_dual}  doubly_even={de.condition_holds}"]
    return payload, status, lines


def cmd_distance(args):
    code = _build(args)
    k = compute_k_rank(code)
    if k == 0:
        raise CommandError("code has no logical qubits (k = 0)", EXIT_INPUT)
    kw = {}
    if args.method == "exact":
        kw = {"budget": args.budget, "seed": args.seed, "jobs": args.jobs}
    elif args.method == "randomized":
        kw = {"trials": args.trials, "seed": args.seed, "budget": args.budget}
    elif args.method == "brute":
        kw = {"w_max": args.w_max}
    try:
        res = code_distance(code, args.method, **kw)
    except LookupError as exc:
        raise CommandError(str(exc), EXIT_INPUT) from exc
    payload = {"n": code.n, "k": k, **res.to_dict()}
    status = EXIT_DOWNGRADED if (args.method == "exact" and res.status == UPPER_BOUND) else EXIT_OK
    lines = [f"[[{code.n},{k},{res.d}]]  status={res.status}  method={res.method}  lower_bound={res.lower_bound}"]
    return payload, status, lines


def cmd_verify_gates(args):
    code = _build(args)
    rep = gate_report(code)
    lines = [f"self_dual={rep['self_dual']}  doubly_even={rep['doubly_even']}"]
    for gate, entry in rep["gates"].items():
        lines.append(f"{gate:5s} preserved={entry['preserved']}  matches_paper={entry['matches_paper']}")
        if entry["counterexample"]:
            ce = entry["counterexample"]
            lines.append(f"      counterexample: {ce['sector']}-row {ce['row']} weight {ce['weight']} sign {ce['sign']}")
    return rep, EXIT_OK, lines


def cmd_groebner(args):
    if args.mode == "theorem1":
        if len(args.abcd) != 4:
            raise CommandError("--abcd needs four integers a,b,c,d", EXIT_INPUT)
        try:
            rep = verify_theorem1(*args.abcd)
        except ValueError as exc:
            raise CommandError(str(exc), EXIT_NOT_ZERO_DIM) from exc
        # substitution M = x^a y^b, N = x^c y^d turns the ideal into (1+M+N, M+N+MN); lex N > M
        order = MonomialOrder.lex(1, 0)
        gb = buchberger([parse_poly("1 + x + y"), parse_poly("x + y + x*y")], order, names=("M", "N"))
        std = standard_monomials(gb)
        payload = {
            "mode": "theorem1",
            **rep,
            "variables": {"M": f"x^{args.abcd[0]} y^{args.abcd[1]}", "N": f"x^{args.abcd[2]} y^{args.abcd[3]}"},
            "order": "lex N > M",
            "basis": gb.as_strings(),
            "standard_monomials": [gb.format_poly({m}) for m in std],
            "dim": len(std),
        }
        lines = [
            f"basis (lex N > M): {{{', '.join(gb.as_strings())}}}",
            f"dim = {len(std)}; Delta = {rep['delta']}; k_max predicted {rep['k_max_predicted']}, "
            f"computed {_fmt_dim(rep['k_max_computed'])}, on torus {rep['k_on_torus']}",
        ]
        return payload, EXIT_OK, lines

    if not args.poly:
        raise CommandError("custom mode needs at least one --poly", EXIT_INPUT)
    try:
        polys = [parse_poly(p) for p in args.poly]
    except PolySyntaxError as exc:
        raise CommandError(str(exc), EXIT_INPUT) from exc
    if args.laurent:
        gb = laurent_groebner(polys)
    else:
        if any(m.ex < 0 or m.ey < 0 for p in polys for m in p.terms):
            raise CommandError("negative exponents need --laurent", EXIT_INPUT)
        order = MonomialOrder.lex(1, 0) if args.order == "lex" else MonomialOrder((1, 0), "grevlex")
        gb = buchberger(polys, order)
    dim = staircase_dimension(gb)
    std = standard_monomials(gb) if dim != INFINITE else None
    payload = {
        "mode": "custom",
        "ring": "laurent" if args.laurent else "polynomial",
        "basis": gb.as_strings(),
        "standard_monomials": None if std is None else [gb.format_poly({m}) for m in std],
        "dim": _fmt_dim(dim),
    }
    lines = [f"basis: {{{', '.join(gb.as_strings())}}}", f"dim = {_fmt_dim(dim)}"]
    status = EXIT_NOT_ZERO_DIM if dim == INFINITE else EXIT_OK
    return payload, status, lines


def cmd_search(args):
    cfg = SearchConfig(
        n_min=args.n_min,
        n_max=args.n_max,
        min_k=args.min_k,
        distance=args.distance,
        budget=args.budget,
        trials=args.trials,
        seed=args.seed,
        out=args.out,
        jobs=args.jobs,
    )
    res = run_search(cfg)
    winners = [w.to_dict() for _, w in sorted(res.winners.items())]
    payload = {
        "winners": winners,
        "evaluated": res.evaluated,
        "skipped": res.skipped,
        "resumed": res.resumed,
        "out": args.out,
    }
    status = EXIT_OK
    if any(w.distance.status == UPPER_BOUND and cfg.method_for(w.n) == "exact" for w in res.winners.values()):
        status = EXIT_DOWNGRADED
    lines = ["[[n,k,d]]        f                          a1        a2        kd^2/n"]
    for w in res.winners.values():
        lines.append(
            f"[[{w.n},{w.k},{w.d}]]".ljust(17)
            + str(w.f).ljust(27)
            + str(tuple(w.torus.a1)).ljust(10)
            + str(tuple(w.torus.a2)).ljust(10)
            + f"{float(w.metric):.2f}"
            + ("" if w.exact else "  (d upper bound)")
        )
    return payload, status, lines


def cmd_table(args):
    rows = rows_for(set(args.rows) if args.rows else None, max_n=args.max_n, min_n=args.min_n)
    checks = reproduce_table(
        rows,
        distance=args.distance,
        budget=args.budget,
        trials=args.trials,
        seed=args.seed,
        with_distance=not args.no_distance,
    )
    passed = sum(c.passed for c in checks)
    payload = {"rows": [c.to_dict() for c in checks], "passed": passed, "total": len(checks)}
    status = EXIT_OK
    if any(c.d_status == UPPER_BOUND and c.d_method == "ILP" for c in checks):
        status = EXIT_DOWNGRADED
    if passed < len(checks):
        status = EXIT_TABLE_DIFF
    lines = ["[[n,k,d]]        f                              a1        a2        kd^2/n  check"]
    for c in checks:
        r = c.row
        verdict = "ok" if c.passed else "FAIL: " + "; ".join(c.failures)
        if c.passed and c.d_status == UPPER_BOUND:
            verdict = "ok (d upper bound)"
        lines.append(
            r.label.ljust(17) + r.f.ljust(31) + str(r.a1).ljust(10) + str(r.a2).ljust(10)
            + f"{r.printed_metric:<8}{verdict}"
        )
    lines.append(f"{passed}/{len(checks)} rows pass")
    return payload, status, lines


COMMANDS = {
    "params": cmd_params,
    "distance": cmd_distance,
    "verify-gates": cmd_verify_gates,
    "groebner": cmd_groebner,
    "search": cmd_search,
    "table": cmd_table,
}


# ----------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=float, default=None, help="seconds for exact distance runs")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("-v", "--verbose", action="count", default=0)

    code = argparse.ArgumentParser(add_help=False)
    code.add_argument("--f", required=True, help="polynomial, e.g. '1+x+y+y^-1'")
    code.add_argument("--g", default=None, help="second polynomial (default: antipode of f)")
    code.add_argument("--a1", type=_vector, required=True, help="lattice vector 'p,q'")
    code.add_argument("--a2", type=_vector, required=True, help="lattice vector 'p,q'")

    parser = argparse.ArgumentParser(prog="sdbb", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"sdbb {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", parents=[common, code], help="n, k (and d) of a code")
    p.add_argument("--with-distance", action="store_true")

    p = sub.add_parser("distance", parents=[common, code], help="minimum distance")
    p.add_argument("--method", choices=("exact", "randomized", "brute"), default="exact")
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--w-max", type=int, default=None)

    sub.add_parser("verify-gates", parents=[common, code], help="transversal CNOT/H/S checks")

    p = sub.add_parser("groebner", parents=[common], help="Groebner bases and quotient dimensions")
    p.add_argument("mode", choices=("theorem1", "custom"))
    p.add_argument("--abcd", type=_int_list, default=[1, 0, 0, 1])
    p.add_argument("--poly", action="append", default=[])
    p.add_argument("--laurent", action="store_true", help="work in the Laurent ring")
    p.add_argument("--order", choices=("lex", "grevlex"), default="lex")

    p = sub.add_parser("search", parents=[common], help="exhaustive weight-8 search")
    p.add_argument("--n-min", type=int, default=16)
    p.add_argument("--n-max", type=int, default=16)
    p.add_argument("--min-k", type=int, default=4)
    p.add_argument("--distance", default="exact:64,randomized")
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--out", default=None, help="JSON-lines results file (resumable)")

    p = sub.add_parser("table", parents=[common], help="diff against the reference tables")
    p.add_argument("--rows", type=_int_list, default=[1, 2], help="table numbers, e.g. 1,2")
    p.add_argument("--max-n", type=int, default=None)
    p.add_argument("--min-n", type=int, default=None)
    p.add_argument("--distance", default="exact:100,randomized")
    p.add_argument("--trials", type=int, default=5000)
    p.add_argument("--no-distance", action="store_true")
    return parser


def _config_echo(args) -> dict:
    out = {}
    for key, val in vars(args).items():
        if key in ("verbose", "format"):
            continue
        out[key] = list(val) if isinstance(val, tuple) else val
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    t0 = time.perf_counter()
    try:
        payload, status, lines = COMMANDS[args.command](args)
    except CommandError as exc:
        print(f"sdbb {args.command}: {exc}", file=sys.stderr)
        if args.format == "json":
            env = {"command": args.command, "version": __version__, "config": _config_echo(args),
                   "error": str(exc), "exit_code": exc.code}
            print(json.dumps(env, sort_keys=True, default=_json_default))
        return exc.code
    elapsed = time.perf_counter() - t0
    if args.format == "json":
        env = {
            "command": args.command,
            "version": __version__,
            "config": _config_echo(args),
            "payload": _strip_elapsed(payload),
            "elapsed": round(elapsed, 3),
        }
        print(json.dumps(env, indent=1, sort_keys=True, default=_json_default))
    else:
        print("\n".join(lines))
    return status


if __name__ == "__main__":
    sys.exit(main())

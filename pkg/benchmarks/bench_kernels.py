"""Numba vs numpy timings for the packed GF(2) kernels.

    python benchmarks/bench_kernels.py            # kernel table
    python benchmarks/bench_kernels.py --e2e      # plus exact distance per backend

Each kernel is run on identical inputs under both backends; outputs are
compared before the timing is reported.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from sdbb import gf2, kernels
from sdbb._accel import HAVE_NUMBA
from sdbb.codebuilder import code_from_strings, logical_basis

CODES = {
    "[[64,8,8]]": ("1 + x + y + y^-1", (0, 8), (4, 4)),
    "[[144,6,14]]": ("1 + x + y + y^-2", (0, 24), (3, 11)),
}


def _generator(code):
    basis = logical_basis(code)
    kern = gf2.nullspace(code.h_x)
    words = kernels.n_words(code.n)
    gen = kernels.pack_rows(kern, extra_words=1)
    gen[:, words] = kernels.pack_int_rows(gf2.matmul(kern, basis.l_x.T))
    return gen, words


def _time(fn, repeat):
    fn()  # warm-up (and JIT compile)
    t0 = time.perf_counter()
    for _ in range(repeat):
        out = fn()
    return (time.perf_counter() - t0) / repeat, out


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return bool(np.array_equal(np.asarray(a), np.asarray(b)))


def bench(repeat: int) -> list[tuple]:
    rows = []
    rng = np.random.default_rng(7)
    for label, (f, a1, a2) in CODES.items():
        code = code_from_strings(f, a1, a2)
        gen, words = _generator(code)
        order = rng.permutation(code.n).astype(np.int64)
        zero = np.zeros(gen.shape[1], dtype=np.uint64)
        red = gen.copy()
        kernels.NUMPY_KERNELS["rref"](red, np.arange(code.n, dtype=np.int64))
        cases = {
            "rref": lambda K: K["rref"](gen.copy(), order),
            "isd_trial": lambda K: K["isd_trial"](gen, words, order, code.n + 1),
            "best_combination t=3": lambda K: K["best_combination"](red, words, 3, code.n + 1, 0, zero),
        }
        for name, call in cases.items():
            t_np, out_np = _time(lambda: call(kernels.NUMPY_KERNELS), repeat)
            if HAVE_NUMBA:
                t_nb, out_nb = _time(lambda: call(kernels.NUMBA_KERNELS), repeat)
                if not _same(out_np, out_nb):
                    raise AssertionError(f"{name} on {label}: backends disagree")
            else:
                t_nb = float("nan")
            rows.append((label, name, t_nb, t_np))
    return rows


def e2e() -> list[tuple]:
    snippet = (
        "import time;from sdbb.codebuilder import code_from_strings;"
        "from sdbb.distance import distance_exact;"
        "c=code_from_strings('1 + x + x^2*y + x^-1*y',(0,7),(4,3));"
        "distance_exact(c);t=time.perf_counter();r=distance_exact(c);"
        "print(r.d, time.perf_counter()-t)"
    )
    out = []
    for flag in ("0", "1"):
        env = dict(os.environ, SDBB_PURE_NUMPY=flag)
        res = subprocess.run([sys.executable, "-c", snippet], env=env, capture_output=True, text=True, check=True)
        d, secs = res.stdout.split()
        out.append(("numpy" if flag == "1" else "numba", int(d), float(secs)))
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--e2e", action="store_true", help="also time exact distance of [[56,6,8]] per backend")
    args = ap.parse_args()

    print(f"{'code':<14}{'kernel':<22}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>9}")
    for label, name, t_nb, t_np in bench(args.repeat):
        print(f"{label:<14}{name:<22}{1e3 * t_nb:>12.3f}{1e3 * t_np:>12.3f}{t_np / t_nb:>9.1f}")
    if args.e2e:
        print()
        for name, d, secs in e2e():
            print(f"distance_exact [[56,6,8]] backend={name:<6} d={d}  {secs:.3f} s")


if __name__ == "__main__":
    main()

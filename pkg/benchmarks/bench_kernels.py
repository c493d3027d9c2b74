"""Time the hot kernels compiled with numba against the interpreted fallback.

Each backend runs in its own interpreter because the choice is made at import
time (``QMAT_DISABLE_JIT``).  The numba column excludes compilation: every
workload is run once to warm up before timing.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
from qmatroids import _accel
from qmatroids.classify import classify, to_matroid
from qmatroids.extension import count_selectors
from qmatroids.group import automorphism_order, is_canonical
from qmatroids.oracle import all_rank_tables
from qmatroids.qmatroid import uniform

quick, repeat = sys.argv[1] == "1", int(sys.argv[2])
parent = to_matroid(classify(2, 4, 2, jobs=1)[-2])
work = {
    "orbit sweep: |Aut U(1,3)| over GL(3,2)": lambda: automorphism_order(uniform(1, 3, 2)),
    "orbit sweep: |Aut U(2,4)| over GL(4,2)": lambda: automorphism_order(uniform(2, 4, 2)),
    "canonicity check, 10 classes (2,4,2)": lambda: [is_canonical(to_matroid(e)) for e in classify(2, 4, 2, jobs=1)],
    "selector count, one (2,4,2) parent": lambda: count_selectors(parent),
    "brute-force rank tables on F_2^3": lambda: all_rank_tables(2, 3),
}
if quick:
    work.pop("orbit sweep: |Aut U(2,4)| over GL(4,2)")
out = {"backend": _accel.backend(), "times": {}}
for name, fn in work.items():
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    out["times"][name] = best
print(json.dumps(out))
"""


def run(disable: bool, quick: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("QMAT_DISABLE_JIT", None)
    if disable:
        env["QMAT_DISABLE_JIT"] = "1"
    res = subprocess.run(
        [sys.executable, "-c", WORKER, "1" if quick else "0", str(repeat)],
        capture_output=True, text=True, env=env, check=True,
    )
    return json.loads(res.stdout.strip().splitlines()[-1])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="skip the GL(4,2) sweep (slow without numba)")
    args = ap.parse_args()
    jit = run(False, args.quick, args.repeat)
    py = run(True, args.quick, args.repeat)
    width = max(len(k) for k in jit["times"])
    print(f"{'workload':<{width}}  {'numba [s]':>10}  {'python [s]':>11}  {'speedup':>8}")
    for name, t_jit in jit["times"].items():
        t_py = py["times"][name]
        print(f"{name:<{width}}  {t_jit:>10.4f}  {t_py:>11.4f}  {t_py / max(t_jit, 1e-9):>7.0f}x")


if __name__ == "__main__":
    main()

"""Time the hot kernels compiled with numba and as plain Python.

Each path runs in its own interpreter; the pure-Python one sets
RZ_STRATA_NO_NUMBA=1, so nested helper kernels are uncompiled as well.

    python3 benchmarks/bench_kernels.py [--points 200] [--repeat 3]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from rzstrata import _latkern as K_
from rzstrata import hermitian as hm
from rzstrata import padlat as P
from rzstrata._accel import HAVE_NUMBA


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def workloads(points, m=2):
    S = P.stratum_model(P.reference_type3(3), m)
    X = hm.enumerate_isotropic_vectors(3, m)
    idx = np.random.default_rng(0).choice(len(X), points, replace=False)
    G, E = P.stratum_generators(S, X[idx])
    big = S.big
    Rw = big.ring(4 * big.K)
    hnf_args = (G, big.p, big.K, big.R.red, big.R.M, big.digits, big.inv_t, big.pw)
    prof_args = (G, E, False, big.p, big.K, big.R.red, big.R.M, big.digits, big.inv_t, big.pw,
                 big.sig[1], big.sig[2], Rw.red, Rw.M)
    F = hm.field(3, m)
    cls_args = (X, F.frob_t[F.frob_t], F.add_table, F.mul_table, F.neg, F.inv_t)
    return [
        ("hnf_batch", K_.hnf_batch, hnf_args),
        ("inert_profile_batch", K_.inert_profile_batch, prof_args),
        ("classify_isotropic", hm._classify_kernel, cls_args),
    ]


def measure(points, repeat):
    out = {}
    for name, fn, fargs in workloads(points):
        fn(*fargs)  # compile outside the timing
        out[name] = best_of(lambda: fn(*fargs), repeat)
    return out


def run_child(points, repeat, no_numba):
    env = dict(os.environ)
    env.pop("RZ_STRATA_NO_NUMBA", None)
    if no_numba:
        env["RZ_STRATA_NO_NUMBA"] = "1"
    cmd = [sys.executable, __file__, "--child", "--points", str(points), "--repeat", str(repeat)]
    res = subprocess.run(cmd, env=env, check=True, capture_output=True, text=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        print(json.dumps({"numba": HAVE_NUMBA, "times": measure(args.points, args.repeat)}))
        return
    fast = run_child(args.points, args.repeat, no_numba=False)
    slow = run_child(args.points, 1, no_numba=True)
    if not fast["numba"] or slow["numba"]:
        raise SystemExit("could not set up both kernel paths")
    print(f"{'kernel':<22} {'numba s':>10} {'python s':>10} {'speedup':>9}")
    for name, tf in fast["times"].items():
        tp = slow["times"][name]
        print(f"{name:<22} {tf:>10.4f} {tp:>10.4f} {tp / tf:>8.1f}x")


if __name__ == "__main__":
    main()

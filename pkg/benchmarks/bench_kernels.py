"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--samples N] [--repeat R]
"""

import argparse
import time

import numpy as np

from meandist import _kernels_py
from meandist.catalog import get_recipe
from meandist.irreducible import _overlap_setup
from meandist.oracle import _Sampler, _generator

try:
    from meandist import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=1 << 16)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    s = _Sampler(get_recipe("dodecahedron").polytope())
    rng = _generator(1, 0, 0)
    UA = rng.random((args.samples, 4))
    UB = rng.random((args.samples, 4))
    cfg = get_recipe("octahedron").configurations["P22r"]
    st = _overlap_setup(cfg.A, cfg.B)
    K = np.random.default_rng(2).uniform(-1.5, 1.5, size=(args.samples // 4, 2))

    cases = {
        "mc_accumulate (p=1)": lambda m: m.mc_accumulate(s.simplices, s.cdf, s.simplices, s.cdf, 1.0, UA, UB),
        "mc_accumulate (p=1.5)": lambda m: m.mc_accumulate(s.simplices, s.cdf, s.simplices, s.cdf, 1.5, UA, UB),
        "overlap_values": lambda m: m.overlap_values(st.A2, st.B2, st.kind, K),
    }
    print(f"{'kernel':24s} {'python [ms]':>12s} {'compiled [ms]':>14s} {'speedup':>8s}")
    for name, call in cases.items():
        py = best_of(lambda: call(_kernels_py), args.repeat)
        if _ckernels is None:
            print(f"{name:24s} {py * 1e3:12.2f} {'n/a':>14s} {'n/a':>8s}")
            continue
        c = best_of(lambda: call(_ckernels), args.repeat)
        print(f"{name:24s} {py * 1e3:12.2f} {c * 1e3:14.2f} {py / c:8.1f}x")


if __name__ == "__main__":
    main()

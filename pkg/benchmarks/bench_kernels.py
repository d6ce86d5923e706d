"""Compare the pure-Python and compiled kernels on index construction.

    python3 benchmarks/bench_kernels.py [--structures 20] [--size 5] [--repeat 3]
"""

import argparse
import random
import time

from apfol import kernels
from apfol.enumeration import Bounds, FragmentSpec, _cached_index, build_index
from apfol.suites import random_structure

WORKLOADS = {
    "functions a2 d2 q1": (Bounds(2, 2, 1), None),
    "functions+R a2 d2 q1": (Bounds(2, 2, 1), 0.3),
    "functions a3 d2 q0": (Bounds(3, 2, 0), None),
}


def run(backend, structures, bounds):
    _cached_index.cache_clear()
    start = time.perf_counter()
    out = [build_index(S, S, FragmentSpec("cformula", bounds), backend) for S in structures]
    return time.perf_counter() - start, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--structures", type=int, default=20)
    ap.add_argument("--size", type=int, default=5)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    backends = kernels.available()
    if "cython" not in backends:
        print("compiled kernels not built; only the pure-Python backend is timed")
    print(f"{'workload':24s}" + "".join(f"{b:>12s}" for b in backends) + "     speedup")
    for label, (bounds, density) in WORKLOADS.items():
        rng = random.Random(args.seed)
        structures = [random_structure(rng, args.size, 2, density, name=f"S{i}")
                      for i in range(args.structures)]
        best, results = {}, {}
        for b in backends:
            times = []
            for _ in range(args.repeat):
                t, out = run(b, structures, bounds)
                times.append(t)
            best[b] = min(times)
            results[b] = [(idx.ext_a, idx.ext_b) for idx in out]
        if len(set(map(repr, results.values()))) != 1:
            raise SystemExit(f"{label}: backends disagree")
        speed = f"{best['python'] / best['cython']:10.2f}x" if "cython" in best else ""
        print(f"{label:24s}" + "".join(f"{best[b]:11.3f}s" for b in backends) + speed)


if __name__ == "__main__":
    main()

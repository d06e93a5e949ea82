"""Compare the compiled and NumPy scan prefilters.

    python benchmarks/bench_kernels.py [--qmax 2000000] [--repeat 3]

Both backends must return the same candidate list; the script reports
wall time per backend and the speedup.
"""

import argparse
import time

import numpy as np

from littlewood.kernels import backends

PHI = (1 + 5 ** 0.5) / 2
SQRT2M1 = 2 ** 0.5 - 1

CASES = {
    "dirichlet": (PHI, 0.0, 0.0, 0.0, False, np.empty(0, dtype=np.int64)),
    "hybrid": (PHI, 0.0, SQRT2M1, 0.3, True, np.empty(0, dtype=np.int64)),
    "mixed-2adic": (SQRT2M1, 1 / 3, 0.0, 0.0, False,
                    np.array([2 ** k for k in range(1, 40)], dtype=np.int64)),
}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--qmax", type=int, default=2_000_000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    impls = backends()
    print(f"backends: {', '.join(impls)}; q in [1, {args.qmax}]")
    for name, case in CASES.items():
        timings, results = {}, {}
        for backend, fn in impls.items():
            best = float("inf")
            for _ in range(args.repeat):
                t = time.perf_counter()
                out = fn(1, args.qmax, *case)
                best = min(best, time.perf_counter() - t)
            timings[backend], results[backend] = best, np.asarray(out)
        ref = results["numpy"]
        agree = all(np.array_equal(ref, r) for r in results.values())
        line = "  ".join(f"{b}={t * 1e3:8.1f} ms" for b, t in timings.items())
        speed = ""
        if "cython" in timings:
            speed = f"  speedup={timings['numpy'] / timings['cython']:.1f}x"
        print(f"{name:12s} {line}{speed}  candidates={len(ref)}  agree={agree}")


if __name__ == "__main__":
    main()

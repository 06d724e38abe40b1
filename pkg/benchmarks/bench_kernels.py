"""Compare the compiled and pure-numpy convex-roof kernels.

Run from the repository root::

    python benchmarks/bench_kernels.py [--repeat 3]

Each row times one ``refine`` call (fixed seed, identical inputs for both
backends) and one full ``ef_convex_roof`` run, and reports the speed-up.
"""
import argparse
import time

import numpy as np

from locorth import kernels
from locorth.core import BipartiteCut, random_density_operator
from locorth.entanglement import RoofConfig, ef_convex_roof

CASES = [  # (dims, rank, K)
    ((2, 2), 3, 8),
    ((2, 4), 4, 16),
    ((3, 3), 3, 9),
    ((2, 6), 6, 24),
]


def _rows(rng, k, n):
    m = rng.standard_normal((k, n)) + 1j * rng.standard_normal((k, n))
    return np.ascontiguousarray(m / np.sqrt(np.sum(np.abs(m) ** 2)))


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--restarts", type=int, default=5)
    args = ap.parse_args(argv)
    if kernels.BACKEND != "compiled":
        print("compiled kernel unavailable; build it with `pip install -e .`")
        return 1
    backends = ("compiled", "python")
    cut = BipartiteCut({0}, {1})
    print(f"{'case':<16}{'what':<8}{'compiled s':>12}{'python s':>12}{'speed-up':>10}")
    for dims, rank, k in CASES:
        rng = np.random.default_rng(0)
        psi = _rows(rng, k, dims[0] * dims[1])
        t_ref = {b: _best(lambda b=b: kernels.get_backend(b).refine(
            psi.copy(), dims[0], dims[1], np.pi / 4, 1e-3, 1e-6, 2000), args.repeat)
            for b in backends}
        rho = random_density_operator(list(dims), rng, rank=rank)
        t_roof = {b: _best(lambda b=b: ef_convex_roof(
            rho, cut, RoofConfig(K=k, restarts=args.restarts, backend=b)), 1)
            for b in backends}
        name = f"{dims[0]}x{dims[1]} r{rank} K{k}"
        for what, t in (("refine", t_ref), ("roof", t_roof)):
            print(f"{name:<16}{what:<8}{t['compiled']:>12.4f}{t['python']:>12.4f}"
                  f"{t['python'] / t['compiled']:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

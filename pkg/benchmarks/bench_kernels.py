"""Compiled vs numpy kernels on the workloads the evaluators generate.

    python benchmarks/bench_kernels.py [--n 4] [--degree 8] [--repeat 20]
"""

import argparse
import time

import numpy as np

from dnhirota import kernels
from dnhirota.heisenberg import hierarchy_coefficients
from dnhirota.hirota import context, gm_residual, kw_lhs, random_tau
from dnhirota.series import TruncatedSeries


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def workloads(n, degree, rng):
    ctx = context(n, degree)
    space = ctx.space("t", "y", "u")
    a = TruncatedSeries(space, rng.normal(size=space.size) + 0j)
    b = TruncatedSeries(space, rng.normal(size=space.size) + 0j)
    coeffs = hierarchy_coefficients(n)
    f, g = random_tau(n, degree, rng), random_tau(n, degree, rng)
    return {
        f"dense product, size {space.size}": lambda: a * b,
        "kw_lhs": lambda: kw_lhs(f, g, coeffs),
        "gm_residual": lambda: gm_residual(f, g, coeffs),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=4)
    parser.add_argument("--degree", type=int, default=8)
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()

    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("compiled extension not built; only the numpy backend is available")
    rng = np.random.default_rng(0)
    jobs = workloads(args.n, args.degree, rng)
    results = {}
    previous = kernels.backend()
    for name in backends:
        kernels.use_backend(name)
        for job, fn in jobs.items():
            fn()  # warm the caches
            results[(job, name)] = best_of(fn, args.repeat if "product" in job else 3)
    kernels.use_backend(previous)

    print(f"n={args.n} degree={args.degree}")
    print(f"{'workload':<28}" + "".join(f"{b:>12}" for b in backends) + "     speedup")
    for job in jobs:
        row = [results[(job, b)] for b in backends]
        speed = f"{row[0] / row[-1]:9.1f}x" if len(row) > 1 else ""
        print(f"{job:<28}" + "".join(f"{t * 1e3:10.3f}ms" for t in row) + speed)


if __name__ == "__main__":
    main()

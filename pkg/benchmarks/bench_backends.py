"""Time the numpy and numba kernel implementations side by side.

    python3 benchmarks/bench_backends.py [--repeat 20]

The first numba call per kernel (JIT compile or cache load) is excluded.
"""
import argparse
import time

import numpy as np

from optoqht import kernels
from optoqht.model import InputNoiseSpec, SystemParams, diffusion_matrix, drift_matrix, input_covariance


def _cases():
    params = SystemParams()
    A = drift_matrix(params)
    D = diffusion_matrix(params, 1e6, input_covariance(InputNoiseSpec.vacuum(), params.kappa))
    rng = np.random.default_rng(0)
    samples = rng.standard_normal((20000, 100))
    a = np.full(4096, 49.5)
    x = rng.uniform(0.0, 150.0, 4096)
    r1 = rng.normal(scale=1e-7, size=(200000, 3))
    r2 = rng.normal(scale=1e-7, size=(200000, 3))
    return {
        "expm 6x6": lambda m: m.expm(A * 1e-7),
        "transition_and_noise t=20/gamma_m": lambda m: m.transition_and_noise(A, D, 20.0 / params.gamma_m),
        "gammainc_pair 4096": lambda m: m.gammainc_pair(a, x),
        "count_rejections 20000x100": lambda m: m.count_rejections(samples, 1.0, 123.2),
        "neg_laplacian_kernel_sums 2e5": lambda m: m.neg_laplacian_kernel_sums(r1, r2, 1e-7),
    }


def bench(fn, repeat):
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()
    impls = kernels.implementations()
    print(f"{'kernel':36s}" + "".join(f"{name:>12s}" for name in impls) + "   speedup")
    for label, call in _cases().items():
        times = {name: bench(lambda: call(mod), args.repeat) for name, mod in impls.items()}
        row = f"{label:36s}" + "".join(f"{times[n] * 1e3:10.3f}ms" for n in impls)
        if "numba" in times:
            row += f"   {times['numpy'] / times['numba']:6.2f}x"
        print(row)


if __name__ == "__main__":
    main()

"""Compare the compiled kernels against the numpy fallback.

Run from the repository root::

    python3 benchmarks/bench_kernels.py [--repeat 5]

Per-kernel timings use inputs sized like the default problem (G = 2048
sample points, 1000 hidden units, N = 100 basis states, M = 4000 finite
difference points).  The last block times whole training iterations in a
subprocess per backend, since the backend is fixed at import.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from vqs.kernels import available_backends

TRAIN_SNIPPET = """
import time
from vqs import kernels
from vqs.config import load_config
from dataclasses import replace
from vqs.trainer import train
cfg = replace(load_config("{preset}"), max_iters={iters})
t = time.perf_counter()
train(cfg)
print(kernels.BACKEND, (time.perf_counter() - t) / {iters})
"""


def kernel_cases(rng):
    x = rng.uniform(size=2048)
    w = rng.uniform(-1, 1, size=1000)
    b = rng.uniform(-1, 1, size=1000)
    z = rng.normal(size=(2048, 1000))
    grad = rng.normal(size=(2048, 1000))
    out = np.maximum(z, 0.0)
    A0 = rng.normal(size=(100, 100))
    A0 = A0 + A0.T
    n = 4000
    lower = np.full(n - 1, -1.0)
    diag = np.full(n, 2.5)
    rhs = rng.normal(size=n)

    def sweep(mod):
        A = A0.copy()
        V = np.eye(100)
        mod.jacobi_sweep(A, V)

    return {
        "scalar_affine 2048x1000": lambda mod: mod.scalar_affine(x, w, b),
        "relu_forward 2048x1000": lambda mod: mod.relu_forward(z),
        "relu_backward 2048x1000": lambda mod: mod.relu_backward(grad, out),
        "jacobi_sweep 100x100": sweep,
        "tridiag_solve n=4000": lambda mod: mod.tridiag_solve(lower, diag, lower, rhs),
    }


def best_time(fn, repeat):
    number = 1
    while timeit.timeit(fn, number=number) < 0.05:
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--train-iters", type=int, default=50)
    parser.add_argument("--preset", default="perturbed_a")
    args = parser.parse_args(argv)

    backends = available_backends()
    names = sorted(backends)
    if "cython" not in backends:
        print("compiled extension not built; only the fallback is timed")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<26}" + "".join(f"{n + ' (ms)':>16}" for n in names) + f"{'speedup':>10}")
    for label, fn in kernel_cases(rng).items():
        times = {n: best_time(lambda: fn(backends[n]), args.repeat) for n in names}
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{label:<26}" + "".join(f"{1e3 * times[n]:>16.3f}" for n in names) + f"{speed:>10.1f}")

    print(f"\ntraining iteration, preset {args.preset}, {args.train_iters} iterations")
    code = TRAIN_SNIPPET.format(preset=args.preset, iters=args.train_iters)
    for name in names:
        env = dict(os.environ, VQS_BACKEND=name)
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        backend, seconds = res.stdout.split()
        print(f"  {backend:<8} {1e3 * float(seconds):8.2f} ms/iteration")


if __name__ == "__main__":
    main()

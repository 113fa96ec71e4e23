"""Compare the compiled kernels against the pure NumPy fallback.

Run:  python benchmarks/bench_backends.py [--repeats N]
"""

import argparse
import time

import numpy as np

from sigsal.kernels import available_backends


def timed(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def workloads():
    rng = np.random.default_rng(0)
    img = rng.random((256, 256))
    x = rng.normal(size=(8, 64, 64))
    kernel = rng.normal(size=(16, 8, 3, 3))
    bias = rng.normal(size=16)
    uniform_out = np.empty(200_000)

    def bench_bilateral(mod):
        mod.bilateral(img, 3.0, 0.1, 6)

    def bench_conv(mod):
        mod.conv2d(x, kernel, bias, 1, (1, 1, 1, 1))

    def bench_xoshiro(mod):
        state = np.array([1, 2, 3, 4], dtype=np.uint64)
        mod.xoshiro_fill(state, uniform_out)

    return [
        ("bilateral 256x256 r=6", bench_bilateral),
        ("conv2d 8->16 ch 64x64", bench_conv),
        ("xoshiro fill 200k", bench_xoshiro),
    ]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    backends = available_backends()
    print(f"backends: {', '.join(backends)}")
    header = f"{'workload':<26}" + "".join(f"{name:>12}" for name in backends)
    if len(backends) > 1:
        header += f"{'speedup':>10}"
    print(header)
    for label, fn in workloads():
        times = {name: timed(lambda m=mod: fn(m), args.repeats)
                 for name, mod in backends.items()}
        row = f"{label:<26}" + "".join(f"{times[name] * 1e3:>10.2f}ms" for name in backends)
        if "compiled" in times and "pure" in times:
            row += f"{times['pure'] / times['compiled']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()

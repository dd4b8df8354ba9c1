#!/usr/bin/env python3
"""Benchmark the compiled convolution backend against the pure-numpy fallback.

Times the raw replicate-pad convolution kernel and the full degrade pipeline
with each backend, and checks the two produce bit-identical output.

Usage: python3 scripts/bench.py [--repeats N]
"""

import argparse
import time

import numpy as np

from nds import _fallback, backend
from nds.degrade import degrade, sample_recipe
from nds.kernels import gaussian_kernel_iso

try:
    from nds import _kernels
except ImportError:
    _kernels = None


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=10)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    img = rng.random((256, 448, 3))
    refs = [rng.random((256, 448, 3)) for _ in range(2)]
    kern = gaussian_kernel_iso(5, 1.0)
    recipe = sample_recipe(17)

    impls = {"fallback": _fallback.convolve2d_replicate}
    if _kernels is not None:
        impls["ext"] = _kernels.convolve2d_replicate
    else:
        print("compiled extension not available; benchmarking fallback only")

    outputs = {}
    print(f"image 448x256x3, kernel 5x5, best of {args.repeats}")
    for name, conv in impls.items():
        outputs[name] = conv(img, kern)
        dt = best_of(lambda: conv(img, kern), args.repeats)
        print(f"  conv   [{name:8s}] {dt * 1000:7.2f} ms")

    if len(outputs) == 2:
        same = np.array_equal(outputs["ext"], outputs["fallback"])
        print(f"  backends bit-identical: {same}")

    saved = backend.convolve2d_replicate
    try:
        for name, conv in impls.items():
            backend.convolve2d_replicate = conv
            dt = best_of(lambda: degrade(img, refs, recipe), args.repeats)
            note = " (soft target 50 ms)" if dt > 0.050 else ""
            print(f"  degrade[{name:8s}] {dt * 1000:7.2f} ms{note}")
    finally:
        backend.convolve2d_replicate = saved


if __name__ == "__main__":
    main()

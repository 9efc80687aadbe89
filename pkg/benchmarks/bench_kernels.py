"""Benchmark the compiled kernels against the numpy fallback.

Times the three hot kernels (graded convolution, polynomial torus sweep,
bilinear torus sweep) plus two end-to-end paths that lean on them.  Run as

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from polyjet import kernels
from polyjet.jets import basis


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_conv(impl, n=4, repeat=200):
    b = basis(n)
    rng = np.random.default_rng(0)
    a = rng.standard_normal(b.sizes[2]) + 1j * rng.standard_normal(b.sizes[2])
    c = rng.standard_normal(b.sizes[2]) + 1j * rng.standard_normal(b.sizes[2])
    table = b.prod[(2, 2)]
    out = np.zeros(b.sizes[4], dtype=np.complex128)

    def run():
        for _ in range(100):
            impl.conv_acc(a, c, table, out)

    return _time(run, repeat) / 100


def _phase_powers(n, g):
    theta = 2.0 * np.pi * np.arange(g) / g
    pp = np.empty((n, 5, g), dtype=np.complex128)
    for e in range(5):
        pp[:, e, :] = np.exp(1j * e * theta)[None, :]
    return pp


def bench_poly_grid(impl, n=3, g=64, repeat=5):
    b = basis(n)
    rng = np.random.default_rng(1)
    coeffs = (rng.standard_normal((1, b.sizes[2]))
              + 1j * rng.standard_normal((1, b.sizes[2])))
    pp = _phase_powers(n, g)

    def run():
        impl.poly_grid_topk(coeffs, b.expo[2], pp, 10)

    return _time(run, repeat)


def bench_bilinear_grid(impl, n=3, g=64, repeat=5):
    rng = np.random.default_rng(2)
    amat = (rng.standard_normal((1, n, n)) + 1j * rng.standard_normal((1, n, n)))
    amat = (amat + amat.transpose(0, 2, 1)) / 2
    phases = np.ascontiguousarray(_phase_powers(n, g)[:, 1, :])

    def run():
        impl.bilinear_grid_topk(amat, phases, 10)

    return _time(run, repeat)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    impls = kernels.backends()
    print(f"active backend: {kernels.BACKEND}")
    if "compiled" not in impls:
        print("compiled kernels not built; showing the numpy fallback only")

    rows = [
        ("graded conv (n=4, deg 2x2)", bench_conv, {}),
        ("poly torus sweep (n=3, G=64)", bench_poly_grid, {"repeat": args.repeat}),
        ("bilinear torus sweep (n=3, G=64)", bench_bilinear_grid, {"repeat": args.repeat}),
    ]
    print(f"{'kernel':38s} {'python':>12s} {'compiled':>12s} {'speedup':>9s}")
    for name, fn, kw in rows:
        t_py = fn(impls["python"], **kw)
        if "compiled" in impls:
            t_c = fn(impls["compiled"], **kw)
            print(f"{name:38s} {t_py * 1e3:10.3f}ms {t_c * 1e3:10.3f}ms {t_py / t_c:8.1f}x")
        else:
            print(f"{name:38s} {t_py * 1e3:10.3f}ms {'-':>12s} {'-':>9s}")


if __name__ == "__main__":
    main()

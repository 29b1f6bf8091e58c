"""Compare the compiled and numpy kernels on the hot paths.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5] [--threads 1]
"""

import argparse
import timeit

import numpy as np

from ecfnorm import _backend
from ecfnorm.numerics import EXP_NEG_HALF, standardize_batch
from ecfnorm.statistic import QuadratureConfig, build_nodes


def cases(threads):
    rng = np.random.default_rng(0)
    z = rng.uniform(0, 200, 100_000)
    x50 = rng.normal(size=50)
    out = [("j0_array, 1e5 points", lambda k: k.j0_array(z)),
           ("m1_bessel_sums, N=50", lambda k: k.m1_bessel_sums(x50))]
    for m, q in ((1, 512), (2, 4096)):
        xs = standardize_batch(rng.normal(size=(256, 20, m)))
        pts, w = build_nodes(QuadratureConfig.default(m, Q=q), m).antipodal_half()
        out.append((f"statistic batch of 256, N=20, m={m}, Q={q}",
                    lambda k, xs=xs, pts=pts, w=w:
                    k.ecf_discrepancy_batch(xs, pts, w, EXP_NEG_HALF, threads)))
    return out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--threads", type=int, default=1)
    args = p.parse_args()
    names = _backend.available()
    kernels = {n: _backend.load(n) for n in names}
    print(f"{'case':45s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in cases(args.threads):
        best = {}
        for n, k in kernels.items():
            fn(k)
            best[n] = min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat))
        line = f"{label:45s}" + "".join(f"{best[n] * 1e3:10.2f}ms" for n in names)
        if len(names) > 1:
            line += f"{best['python'] / best['cython']:11.1f}x"
        print(line)


if __name__ == "__main__":
    main()

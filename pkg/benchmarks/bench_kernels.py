"""Time the numba and numpy kernel variants on random graphs.

Usage: python3 benchmarks/bench_kernels.py [--sizes 50 200 1000] [--repeat 20]
The first numba call (compilation) is excluded from the timings.
"""

import argparse
import time

import numpy as np

from graphnls import _kernels as K
from graphnls.corpus import random_connected_graph

KERNELS = {
    "laplacian": (K._laplacian_nb, K._laplacian_np, 1),
    "gamma": (K._gamma_nb, K._gamma_np, 2),
    "gamma2_expanded": (K._gamma2_expanded_nb, K._gamma2_expanded_np, 1),
}


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 200, 1000])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--p-extra", type=float, default=0.02)
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        print("numba not installed; nothing to compare")
        return
    rng = np.random.default_rng(0)
    print(f"{'kernel':<16}{'n':>6}{'numba [us]':>14}{'numpy [us]':>14}{'speedup':>10}")
    for n in args.sizes:
        g = random_connected_graph(n, seed=n, p_extra=args.p_extra)
        csr = (g.indptr, g.indices, g.weights, g.mu)
        fns = [rng.standard_normal(n) for _ in range(2)]
        for name, (nb, npy, nargs) in KERNELS.items():
            a = csr + tuple(fns[:nargs])
            assert np.allclose(nb(*a), npy(*a), rtol=1e-12, atol=1e-12)
            t_nb = best_of(nb, a, args.repeat)
            t_np = best_of(npy, a, args.repeat)
            print(f"{name:<16}{n:>6}{t_nb * 1e6:>14.1f}{t_np * 1e6:>14.1f}{t_np / t_nb:>10.1f}")
        x = 0
        t_nb = best_of(K._local_forms_nb, csr + (x,), args.repeat)
        t_np = best_of(K._local_forms_np, csr + (x,), args.repeat)
        print(f"{'local_forms':<16}{n:>6}{t_nb * 1e6:>14.1f}{t_np * 1e6:>14.1f}{t_np / t_nb:>10.1f}")


if __name__ == "__main__":
    main()

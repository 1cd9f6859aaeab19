"""Compare the compiled and NumPy distance kernels.

    python benchmarks/bench_kernels.py --n 20000 --k 16 --dim 8
"""

import argparse
import timeit

import numpy as np

from gbregman import _kernels_py, catalog, centroid, kernels

try:
    from gbregman import _kernels as compiled
except ImportError:
    compiled = None


def operands(n, k, dim, seed):
    spec = catalog.get_entry("kl").spec
    rng = np.random.default_rng(seed)
    X = np.ascontiguousarray(spec.linked(rng.uniform(0.1, 10.0, (n, dim))))
    C = np.ascontiguousarray(spec.linked(rng.uniform(0.1, 10.0, (k, dim))))
    g = spec.generator
    return X, g.eval(X), C, g.eval(C), np.ascontiguousarray(g.grad(C))


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20000)
    ap.add_argument("--k", type=int, default=16)
    ap.add_argument("--dim", type=int, default=8)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    ops = operands(args.n, args.k, args.dim, args.seed)
    backends = {"numpy": _kernels_py}
    if compiled is not None:
        backends["cython"] = compiled
    print(f"n={args.n} k={args.k} dim={args.dim} (default backend: {kernels.BACKEND})")
    for name, mod in backends.items():
        t_assign = best_of(lambda: mod.assign_nearest(*ops), args.repeat)
        t_pair = best_of(lambda: mod.pairwise_bregman(*ops), args.repeat)
        print(f"{name:>7}  assign_nearest {t_assign * 1e3:8.2f} ms   pairwise {t_pair * 1e3:8.2f} ms")

    data = np.random.default_rng(args.seed).uniform(0.1, 10.0, (args.n, args.dim))
    cfg = centroid.ClusterConfig(k=args.k, seed=args.seed, max_iters=20)
    spec = catalog.get_entry("kl").spec
    for name, mod in backends.items():
        kernels.assign_nearest = mod.assign_nearest
        t = best_of(lambda: centroid.kmeans(spec, data, cfg), max(1, args.repeat // 2))
        print(f"{name:>7}  kmeans (20 iters max) {t * 1e3:8.1f} ms")


if __name__ == "__main__":
    main()

"""Time the numba and numpy flavours of each kernel on synthetic inputs.

    python benchmarks/bench_kernels.py [--sizes 1000 10000] [--repeat 5]

Prints one row per kernel and size with the best-of-``repeat`` time of each
flavour. The numba column excludes compilation (one warm-up call first).
"""

import argparse
import timeit

import numpy as np

from webdir import kernels
from webdir._accel import HAVE_NUMBA


def random_tree_csr(rng, n, extra_links):
    parent = np.concatenate([[-1], [rng.integers(0, i) for i in range(1, n)]])
    nbrs = [set() for _ in range(n)]
    for c in range(1, n):
        nbrs[c].add(int(parent[c]))
        nbrs[int(parent[c])].add(c)
    for a, b in rng.integers(0, n, size=(extra_links, 2)):
        if a != b:
            nbrs[int(a)].add(int(b))
    indptr = np.zeros(n + 1, np.int64)
    indptr[1:] = np.cumsum([len(s) for s in nbrs])
    indices = np.array([j for s in nbrs for j in sorted(s)], np.int64)
    return indptr, indices


def cases(rng, n):
    indptr, indices = random_tree_csr(rng, n, n // 5)
    vocab = 256
    mat = rng.random((n, vocab)) * (rng.random((n, vocab)) < 0.05)
    norms = np.sqrt((mat ** 2).sum(1))
    q = rng.random(vocab) * (rng.random(vocab) < 0.05)
    qn = float(np.sqrt((q ** 2).sum()))
    budget = 10 * n
    uniforms = rng.random(budget)
    node_dist = rng.random(n) + 1.0
    target = n - 1
    return {
        "bfs_tree": ((indptr, indices, 0), kernels.bfs_tree_nb, kernels.bfs_tree_np),
        "cosine_distances": ((mat, norms, q, qn, 1e-6), kernels.cosine_distances_nb, kernels.cosine_distances_np),
        "random_walk": ((indptr, indices, 0, target, budget, uniforms), kernels.random_walk_nb, kernels.random_walk_np),
        "greedy_walk": ((indptr, indices, 0, target, budget, node_dist), kernels.greedy_walk_nb, kernels.greedy_walk_np),
    }


def best(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=[1_000, 10_000])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba is not installed; only the numpy column is meaningful")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<18}{'n':>8}{'numba ms':>12}{'numpy ms':>12}{'speed-up':>10}")
    for n in args.sizes:
        for name, (call, nb, np_) in cases(rng, n).items():
            nb(*call)  # compile
            t_nb = best(nb, call, args.repeat)
            t_np = best(np_, call, args.repeat)
            print(f"{name:<18}{n:>8}{t_nb * 1e3:>12.3f}{t_np * 1e3:>12.3f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()

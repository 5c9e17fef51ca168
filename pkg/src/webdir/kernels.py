"""Hot inner loops over CSR adjacency and dense concept matrices.

Every kernel exists in two flavours: a loop version compiled with numba
(``*_nb``) and a numpy version (``*_np``). The public names bind to one of
them according to :mod:`webdir._accel`. Both flavours return identical
results for the graph kernels; the cosine scan may differ in the last ulp
because BLAS sums in a different order.

Graphs are given as ``indptr``/``indices`` int64 arrays with neighbours of
each node sorted ascending.
"""

import numpy as np

from ._accel import USE_NUMBA, njit


def _bfs_tree_loop(indptr, indices, source):
    n = indptr.shape[0] - 1
    hops = np.full(n, -1, np.int64)
    parent = np.full(n, -1, np.int64)
    queue = np.empty(n, np.int64)
    hops[source] = 0
    queue[0] = source
    head = 0
    tail = 1
    while head < tail:
        u = queue[head]
        head += 1
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            if hops[v] < 0:
                hops[v] = hops[u] + 1
                parent[v] = u
                queue[tail] = v
                tail += 1
    return hops, parent


def bfs_tree_np(indptr, indices, source):
    """Level-synchronous BFS returning ``(hops, parent)``.

    Discovery order matches a FIFO queue BFS, so parents agree with the
    loop kernel exactly.
    """
    n = indptr.shape[0] - 1
    hops = np.full(n, -1, np.int64)
    parent = np.full(n, -1, np.int64)
    hops[source] = 0
    frontier = np.array([source], dtype=np.int64)
    level = 0
    while frontier.size:
        starts = indptr[frontier]
        deg = indptr[frontier + 1] - starts
        total = int(deg.sum())
        if total == 0:
            break
        src = np.repeat(frontier, deg)
        offsets = np.arange(total) - np.repeat(np.cumsum(deg) - deg, deg)
        dst = indices[np.repeat(starts, deg) + offsets]
        fresh = hops[dst] < 0
        src, dst = src[fresh], dst[fresh]
        if dst.size == 0:
            break
        _, first = np.unique(dst, return_index=True)
        first = np.sort(first)
        nodes = dst[first]
        level += 1
        hops[nodes] = level
        parent[nodes] = src[first]
        frontier = nodes
    return hops, parent


def _cosine_distances_loop(matrix, norms, query, qnorm, sim_floor):
    k, m = matrix.shape
    out = np.empty(k, np.float64)
    for i in range(k):
        if norms[i] == 0.0 or qnorm == 0.0:
            s = 1.0 if (norms[i] == 0.0 and qnorm == 0.0) else 0.0
        else:
            acc = 0.0
            for j in range(m):
                acc += matrix[i, j] * query[j]
            s = acc / (norms[i] * qnorm)
            if s > 1.0:
                s = 1.0
        if s < sim_floor:
            s = sim_floor
        out[i] = 1.0 / s
    return out


def cosine_distances_np(matrix, norms, query, qnorm, sim_floor):
    """``1 / max(cos(row, query), sim_floor)`` for every row of ``matrix``."""
    k = matrix.shape[0]
    if k == 0:
        return np.empty(0, np.float64)
    sims = np.zeros(k, np.float64)
    live = norms > 0.0
    if qnorm > 0.0:
        sims[live] = (matrix[live] @ query) / (norms[live] * qnorm)
        np.minimum(sims, 1.0, out=sims)
    else:
        sims[~live] = 1.0
    np.maximum(sims, sim_floor, out=sims)
    return 1.0 / sims


def _random_walk_loop(indptr, indices, start, target, budget, uniforms):
    path = np.empty(budget + 1, np.int64)
    path[0] = start
    n = 1
    cur = start
    while cur != target and n <= budget:
        lo = indptr[cur]
        deg = indptr[cur + 1] - lo
        if deg == 0:
            break
        j = int(uniforms[n - 1] * deg)
        if j >= deg:
            j = deg - 1
        cur = indices[lo + j]
        path[n] = cur
        n += 1
    return path[:n]


def _greedy_walk_loop(indptr, indices, start, target, budget, node_dist):
    path = np.empty(budget + 1, np.int64)
    path[0] = start
    n = 1
    cur = start
    prev = -1
    while cur != target and n <= budget:
        lo = indptr[cur]
        hi = indptr[cur + 1]
        if hi == lo:
            break
        best = -1
        best_d = np.inf
        for k in range(lo, hi):
            v = indices[k]
            if v == prev and hi - lo > 1:
                continue
            d = node_dist[v]
            if best < 0 or d < best_d:
                best = v
                best_d = d
        prev = cur
        cur = best
        path[n] = cur
        n += 1
    return path[:n]


bfs_tree_nb = njit(_bfs_tree_loop)
cosine_distances_nb = njit(_cosine_distances_loop)
random_walk_nb = njit(_random_walk_loop)
greedy_walk_nb = njit(_greedy_walk_loop)

# Walks are inherently sequential; the numpy flavour is the interpreted loop.
random_walk_np = _random_walk_loop
greedy_walk_np = _greedy_walk_loop

if USE_NUMBA:
    bfs_tree = bfs_tree_nb
    cosine_distances = cosine_distances_nb
    random_walk = random_walk_nb
    greedy_walk = greedy_walk_nb
else:
    bfs_tree = bfs_tree_np
    cosine_distances = cosine_distances_np
    random_walk = random_walk_np
    greedy_walk = greedy_walk_np

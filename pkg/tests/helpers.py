"""Random fixtures and independent oracles shared by the test modules.

Nothing here calls into the code paths being checked: the BFS oracle walks
an explicit edge list and the reference builder re-implements placement
with plain dicts and ``math``.
"""

import math
from collections import deque
from pathlib import Path

import numpy as np

from webdir.directory import new_directory
from webdir.semantics import ConceptVector, Resource, SemanticsBinding, sem

FIXTURES = Path(__file__).parent / "fixtures"


def random_directory(rng, n, n_links=None, directed=True):
    """Random tree of ``n`` categories with random cross-links and one resource per category."""
    wd = new_directory(cross_links_directed=directed)
    for i in range(n - 1):
        parent = int(rng.choice(sorted(wd.categories)))
        wd.add_category(parent, f"/n{i + 2}")
    ids = sorted(wd.categories)
    if n_links is None:
        n_links = int(rng.integers(0, n + 1))
    for _ in range(n_links * 3):
        if len(wd.cross_links) >= n_links or n < 3:
            break
        a, b = (int(x) for x in rng.choice(ids, 2, replace=False))
        if wd.is_tree_adjacent(a, b) or wd.has_cross_link(a, b):
            continue
        wd.add_cross_link(a, b)
    return wd


def random_binding(rng, wd, vocab=8):
    binding = SemanticsBinding()
    for cid in sorted(wd.categories):
        rid = f"r{cid}"
        wd.add_resource(cid, rid)
        k = int(rng.integers(1, 4))
        toks = rng.choice(vocab, k, replace=False)
        terms = {f"t{int(t)}": int(rng.integers(1, 5)) for t in toks}
        binding.resources[rid] = sem(Resource.from_terms(rid, f"http://x/{rid}", terms))
        binding.vectors[cid] = binding.resources[rid]
    return binding


def edge_list(wd):
    """Directed browse edges, built from the raw category records."""
    edges = []
    for c in wd.categories.values():
        if c.parent is not None:
            edges.append((c.parent, c.id))
            edges.append((c.id, c.parent))
    for a, b in wd.cross_links:
        edges.append((a, b))
        if not wd.cross_links_directed:
            edges.append((b, a))
    return edges


def oracle_path_length(edges, src, dst):
    """Node-counting BFS over an explicit edge list; ``None`` if unreachable."""
    out = {}
    for a, b in edges:
        out.setdefault(a, []).append(b)
    seen = {src: 1}
    q = deque([src])
    while q:
        u = q.popleft()
        if u == dst:
            return seen[u]
        for v in out.get(u, ()):
            if v not in seen:
                seen[v] = seen[u] + 1
                q.append(v)
    return None


def oracle_lengths_from(edges, src):
    """All node-counting distances from ``src`` over an explicit edge list."""
    out = {}
    for a, b in edges:
        out.setdefault(a, []).append(b)
    seen = {src: 1}
    q = deque([src])
    while q:
        u = q.popleft()
        for v in out.get(u, ()):
            if v not in seen:
                seen[v] = seen[u] + 1
                q.append(v)
    return seen


def oracle_distance(a, b, floor=1e-6):
    """Inverse clamped cosine straight from the weight dicts."""
    return 1.0 / max(_cos(a, b), floor)


def oracle_reachability(edges, nodes):
    return {u: {v for v in nodes if oracle_path_length(edges, u, v) is not None} for u in nodes}


def random_walk_trace(rng, wd, length):
    """A valid trace: random neighbour steps from a random start, target = last step."""
    by_src = {}
    for a, b in edge_list(wd):
        by_src.setdefault(a, set()).add(b)
    cur = int(rng.choice(sorted(wd.categories)))
    steps = [cur]
    for _ in range(length - 1):
        nbrs = sorted(by_src.get(cur, ()))
        if not nbrs:
            break
        cur = int(rng.choice(nbrs))
        steps.append(cur)
    return steps


# -- reference construction --------------------------------------------------

def _unit(raw):
    n = math.sqrt(sum(v * v for v in raw.values()))
    return {k: v / n for k, v in raw.items()}


def _cos(a, b):
    if not a or not b:
        return 1.0 if not a and not b else 0.0
    dot = sum(w * b.get(t, 0.0) for t, w in a.items())
    na = math.sqrt(sum(w * w for w in a.values()))
    nb = math.sqrt(sum(w * w for w in b.values()))
    return min(1.0, dot / (na * nb))


def reference_build(streams, h, v, floor=1e-6):
    """Straight transcription of the placement loop over raw count dicts.

    ``streams`` is a list of ``(rid, {token: count})``. Returns a list of
    ``(rid, kind, anchor, category)`` and ``{category: (parent, level)}``.
    """
    cats = {1: (None, 1)}
    raw = {}  # category -> summed raw counts
    log = []
    next_id = 2
    for rid, counts in streams:
        vec = _unit(counts)
        if len(cats) == 1:
            cats[next_id] = (1, 2)
            raw[next_id] = dict(counts)
            log.append((rid, "NewChildCategory", 1, next_id))
            next_id += 1
            continue
        dists = {cid: 1.0 / max(_cos(vec, _unit(raw[cid])), floor) for cid in cats if cid != 1}
        low = min(dists.values())
        anchor = min((c for c in dists if dists[c] <= low * (1 + 1e-12)), key=lambda c: (cats[c][1], c))
        d = dists[anchor]
        if d > v:
            cats[next_id] = (anchor, cats[anchor][1] + 1)
        elif d > h:
            parent = cats[anchor][0]
            cats[next_id] = (parent, cats[parent][1] + 1)
        else:
            for t, c in counts.items():
                raw[anchor][t] = raw[anchor].get(t, 0) + c
            log.append((rid, "MergeIntoExisting", anchor, anchor))
            continue
        raw[next_id] = dict(counts)
        log.append((rid, "NewChildCategory" if d > v else "NewSiblingCategory", anchor, next_id))
        next_id += 1
    return log, cats


def resources_from(streams):
    return [Resource.from_terms(rid, f"http://x/{rid}", counts) for rid, counts in streams]


def random_stream(rng, n, vocab=6):
    out = []
    for i in range(n):
        k = int(rng.integers(1, 4))
        toks = rng.choice(vocab, k, replace=False)
        out.append((f"s{i}", {f"w{int(t)}": int(rng.integers(1, 6)) for t in toks}))
    return out


def cv(**weights):
    return ConceptVector(weights)

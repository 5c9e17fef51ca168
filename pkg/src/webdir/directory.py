"""Directory graph: categories, tree edges, cross-links and path queries.

A directory is a rooted tree of categories plus directed cross-links. For
browsing, tree edges are walkable in both directions and cross-links only
in their stored direction (``cross_links_directed=False`` makes them
two-way). Path lengths count categories, not edges.
"""

from __future__ import annotations

import copy
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from . import kernels
from .errors import (
    DuplicateResource,
    DuplicateUrl,
    ParallelEdge,
    RootNonSemantic,
    SelfLoop,
    TreeEdgeShadow,
    UnknownCategory,
    UnknownParent,
    Unreachable,
)

ROOT_ID = 1


@dataclass
class Category:
    id: int
    level: int
    url: str
    parent: int | None = None
    children: list[int] = field(default_factory=list)
    resources: list[str] = field(default_factory=list)
    non_semantic: bool = False


class CrossLink(NamedTuple):
    src: int
    dst: int


@dataclass(frozen=True)
class StructuralViolation:
    kind: str
    category: int | None
    detail: str = ""


class Adjacency(NamedTuple):
    """CSR view of the browse graph. ``ids[i]`` is the category at position ``i``."""

    ids: np.ndarray
    pos: dict
    indptr: np.ndarray
    indices: np.ndarray
    trees: dict  # source position -> (hops, parent), filled lazily

    def neighbors(self, cid):
        i = self.pos[cid]
        return [int(self.ids[j]) for j in self.indices[self.indptr[i]:self.indptr[i + 1]]]

    def bfs(self, cid):
        i = self.pos[cid]
        tree = self.trees.get(i)
        if tree is None:
            tree = self.trees[i] = kernels.bfs_tree(self.indptr, self.indices, i)
        return tree


class WebDirectory:
    """Rooted category graph. Mutate only through the ``add_*`` methods."""

    def __init__(self, root_url="/", cross_links_directed=True):
        self.root = ROOT_ID
        self.categories: dict[int, Category] = {ROOT_ID: Category(ROOT_ID, 1, root_url)}
        self.cross_links: list[CrossLink] = []
        self.depth = 1
        self.cross_links_directed = cross_links_directed
        self._links: set[CrossLink] = set()
        self._urls: dict[str, int] = {root_url: ROOT_ID}
        self._resource_home: dict[str, int] = {}
        self._next_id = ROOT_ID + 1
        self._version = 0
        self._adj_cache: tuple | None = None

    # -- construction -----------------------------------------------------

    @classmethod
    def from_records(cls, categories: Iterable[Category], cross_links: Iterable[tuple[int, int]],
                     root: int = ROOT_ID, cross_links_directed: bool = True) -> "WebDirectory":
        """Assemble a directory without checking invariants; call :meth:`validate` after."""
        wd = cls.__new__(cls)
        wd.root = root
        wd.categories = {c.id: c for c in categories}
        wd.cross_links = [CrossLink(int(a), int(b)) for a, b in cross_links]
        wd._links = set(wd.cross_links)
        wd.cross_links_directed = cross_links_directed
        wd.depth = max((c.level for c in wd.categories.values()), default=0)
        wd._urls = {}
        for c in wd.categories.values():
            wd._urls.setdefault(c.url, c.id)
        wd._resource_home = {}
        for c in wd.categories.values():
            for r in c.resources:
                wd._resource_home.setdefault(r, c.id)
        wd._next_id = max(wd.categories, default=root) + 1
        wd._version = 0
        wd._adj_cache = None
        return wd

    def _touch(self):
        self._version += 1
        self._adj_cache = None

    def add_category(self, parent: int, url: str, non_semantic: bool = False) -> int:
        if parent not in self.categories:
            raise UnknownParent(parent)
        if url in self._urls:
            raise DuplicateUrl(url)
        cid = self._next_id
        self._next_id += 1
        level = self.categories[parent].level + 1
        self.categories[cid] = Category(cid, level, url, parent=parent, non_semantic=non_semantic)
        self.categories[parent].children.append(cid)
        self._urls[url] = cid
        if level > self.depth:
            self.depth = level
        self._touch()
        return cid

    def add_cross_link(self, src: int, dst: int) -> None:
        for cid in (src, dst):
            if cid not in self.categories:
                raise UnknownCategory(cid)
        if src == dst:
            raise SelfLoop(src)
        if self.is_tree_adjacent(src, dst):
            raise TreeEdgeShadow((src, dst))
        link = CrossLink(src, dst)
        if link in self._links:
            raise ParallelEdge(link)
        self.cross_links.append(link)
        self._links.add(link)
        self._touch()

    def add_resource(self, cid: int, rid: str) -> None:
        if cid not in self.categories:
            raise UnknownCategory(cid)
        if rid in self._resource_home:
            raise DuplicateResource(rid)
        self.categories[cid].resources.append(rid)
        self._resource_home[rid] = cid

    # -- queries ----------------------------------------------------------

    @property
    def next_id(self) -> int:
        """Id the next added category will receive."""
        return self._next_id

    @property
    def category_count(self) -> int:
        return len(self.categories)

    @property
    def root_category(self) -> Category:
        return self.categories[self.root]

    def __getitem__(self, cid: int) -> Category:
        try:
            return self.categories[cid]
        except KeyError:
            raise UnknownCategory(cid) from None

    def __contains__(self, cid) -> bool:
        return cid in self.categories

    def category_of(self, rid: str) -> int | None:
        return self._resource_home.get(rid)

    def resource_ids(self) -> list[str]:
        return [r for cid in sorted(self.categories) for r in self.categories[cid].resources]

    def is_tree_adjacent(self, a: int, b: int) -> bool:
        return self.categories[a].parent == b or self.categories[b].parent == a

    def has_cross_link(self, src: int, dst: int) -> bool:
        return CrossLink(src, dst) in self._links

    def adjacency(self) -> Adjacency:
        if self._adj_cache is not None and self._adj_cache[0] == self._version:
            return self._adj_cache[1]
        ids = np.array(sorted(self.categories), dtype=np.int64)
        pos = {int(c): i for i, c in enumerate(ids)}
        nbrs: list[set[int]] = [set() for _ in ids]
        for c in self.categories.values():
            if c.parent is not None and c.parent in pos:
                nbrs[pos[c.id]].add(pos[c.parent])
                nbrs[pos[c.parent]].add(pos[c.id])
        for a, b in self.cross_links:
            if a in pos and b in pos:
                nbrs[pos[a]].add(pos[b])
                if not self.cross_links_directed:
                    nbrs[pos[b]].add(pos[a])
        indptr = np.zeros(len(ids) + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(s) for s in nbrs])
        flat = [j for s in nbrs for j in sorted(s)]
        indices = np.array(flat, dtype=np.int64)
        adj = Adjacency(ids, pos, indptr, indices, {})
        self._adj_cache = (self._version, adj)
        return adj

    def neighbors(self, cid: int) -> list[int]:
        """Categories one browse step away from ``cid``, ascending by id."""
        self[cid]
        return self.adjacency().neighbors(cid)

    def is_step(self, a: int, b: int) -> bool:
        if a not in self.categories or b not in self.categories:
            return False
        if self.is_tree_adjacent(a, b) or CrossLink(a, b) in self._links:
            return True
        return not self.cross_links_directed and CrossLink(b, a) in self._links

    def shortest_path(self, src: int, dst: int) -> list[int]:
        """One shortest browse from ``src`` to ``dst`` as a list of category ids."""
        self[src], self[dst]
        adj = self.adjacency()
        hops, parent = adj.bfs(src)
        j = adj.pos[dst]
        if hops[j] < 0:
            raise Unreachable((src, dst))
        path = [j]
        while path[-1] != adj.pos[src]:
            path.append(int(parent[path[-1]]))
        return [int(adj.ids[i]) for i in reversed(path)]

    def shortest_path_length(self, src: int, dst: int) -> int:
        """Number of categories on a shortest browse, both endpoints included."""
        self[src], self[dst]
        adj = self.adjacency()
        hops, _ = adj.bfs(src)
        h = int(hops[adj.pos[dst]])
        if h < 0:
            raise Unreachable((src, dst))
        return h + 1

    def path_lengths_from(self, src: int) -> dict[int, int]:
        adj = self.adjacency()
        hops, _ = adj.bfs(src)
        return {int(adj.ids[i]): int(h) + 1 for i, h in enumerate(hops) if h >= 0}

    def ancestors(self, cid: int) -> list[int]:
        out = []
        p = self[cid].parent
        while p is not None:
            out.append(p)
            p = self.categories[p].parent
        return out

    def iter_preorder(self):
        stack = [self.root]
        while stack:
            cid = stack.pop()
            yield cid
            stack.extend(reversed(self.categories[cid].children))

    # -- checks -----------------------------------------------------------

    def validate(self) -> list[StructuralViolation]:
        """Return every invariant breach found; an empty list means the directory is sound."""
        out: list[StructuralViolation] = []
        cats = self.categories
        if self.root not in cats:
            return [StructuralViolation("MissingRoot", None, f"root {self.root} absent")]
        root = cats[self.root]
        if root.parent is not None:
            out.append(StructuralViolation("BadLevel", root.id, "root has a parent"))
        if root.level != 1:
            out.append(StructuralViolation("BadLevel", root.id, f"root level {root.level}"))

        seen_urls: dict[str, int] = {}
        for cid in sorted(cats):
            c = cats[cid]
            if c.url in seen_urls:
                out.append(StructuralViolation("DuplicateUrl", cid, c.url))
            else:
                seen_urls[c.url] = cid

        for cid in sorted(cats):
            c = cats[cid]
            for ch in c.children:
                if ch not in cats or cats[ch].parent != cid:
                    out.append(StructuralViolation("ChildMismatch", cid, f"child {ch}"))
            if c.parent is not None and c.parent in cats and cid not in cats[c.parent].children:
                out.append(StructuralViolation("ChildMismatch", c.parent, f"missing child {cid}"))

        # reachability from the root over parent pointers
        kids: dict[int, list[int]] = {}
        for c in cats.values():
            if c.parent is not None:
                kids.setdefault(c.parent, []).append(c.id)
        reached = {self.root}
        queue = deque([self.root])
        while queue:
            u = queue.popleft()
            for v in sorted(kids.get(u, ())):
                if v not in reached:
                    reached.add(v)
                    queue.append(v)
                    if cats[v].level != cats[u].level + 1:
                        out.append(StructuralViolation(
                            "BadLevel", v, f"level {cats[v].level} under level {cats[u].level}"))

        unreached = sorted(set(cats) - reached)
        done: set[int] = set()
        for start in unreached:
            if start in done:
                continue
            comp = {start}
            queue = deque([start])
            while queue:
                u = queue.popleft()
                nb = list(kids.get(u, ()))
                p = cats[u].parent
                if p is not None and p in cats:
                    nb.append(p)
                for v in nb:
                    if v not in comp:
                        comp.add(v)
                        queue.append(v)
            done |= comp
            orphans = sorted(c for c in comp if cats[c].parent is not None and cats[c].parent not in cats)
            if orphans:
                out.extend(StructuralViolation("Orphan", c, f"unknown parent {cats[c].parent}")
                           for c in orphans)
            else:
                out.append(StructuralViolation(
                    "DisjointComponent", min(comp), f"{len(comp)} categories unreachable from root"))

        seen_links: set[CrossLink] = set()
        for a, b in self.cross_links:
            if a not in cats or b not in cats:
                out.append(StructuralViolation("UnknownEndpoint", a if a not in cats else b, f"{a}->{b}"))
                continue
            if a == b:
                out.append(StructuralViolation("SelfLoop", a, f"{a}->{b}"))
            elif cats[a].parent == b or cats[b].parent == a:
                out.append(StructuralViolation("TreeEdgeShadow", a, f"{a}->{b}"))
            if (a, b) in seen_links:
                out.append(StructuralViolation("ParallelEdge", a, f"{a}->{b}"))
            seen_links.add(CrossLink(a, b))

        homes: dict[str, int] = {}
        for cid in sorted(cats):
            for r in cats[cid].resources:
                if r in homes:
                    out.append(StructuralViolation("DuplicateResource", cid, r))
                else:
                    homes[r] = cid

        max_level = max(c.level for c in cats.values())
        if self.depth != max_level:
            out.append(StructuralViolation("DepthMismatch", None, f"depth {self.depth} != {max_level}"))
        return out

    # -- derived views ----------------------------------------------------

    def surviving_ancestor(self, cid: int) -> int:
        """``cid`` itself if unflagged, else its nearest ancestor without the non-semantic flag."""
        c = self[cid]
        while c.non_semantic and c.parent is not None:
            c = self.categories[c.parent]
        return c.id

    def contract_non_semantic_levels(self) -> "WebDirectory":
        """Copy of this directory with flagged categories spliced out.

        Children of a removed category move up to its parent in place,
        resources move to the parent too, and cross-link endpoints are
        redirected to the nearest surviving ancestor (links that would turn
        into self-loops, tree edges or duplicates are dropped). Ids are kept.
        """
        if self.root_category.non_semantic:
            raise RootNonSemantic(self.root)
        cats = self.categories

        def lifted_children(cid):
            out = []
            for ch in cats[cid].children:
                if cats[ch].non_semantic:
                    out.extend(lifted_children(ch))
                else:
                    out.append(ch)
            return out

        def lifted_resources(cid):
            out = []
            for ch in cats[cid].children:
                if cats[ch].non_semantic:
                    out.extend(cats[ch].resources)
                    out.extend(lifted_resources(ch))
            return out

        new = []
        queue = deque([(self.root, None, 1)])
        while queue:
            cid, parent, level = queue.popleft()
            c = cats[cid]
            kids = lifted_children(cid)
            new.append(Category(cid, level, c.url, parent, kids,
                                list(c.resources) + lifted_resources(cid), False))
            queue.extend((k, cid, level + 1) for k in kids)

        kept = {c.id: c for c in new}
        links: list[tuple[int, int]] = []
        seen = set()
        for a, b in self.cross_links:
            a2, b2 = self.surviving_ancestor(a), self.surviving_ancestor(b)
            if a2 == b2 or kept[a2].parent == b2 or kept[b2].parent == a2 or (a2, b2) in seen:
                continue
            seen.add((a2, b2))
            links.append((a2, b2))
        out = WebDirectory.from_records(new, links, self.root, self.cross_links_directed)
        out._next_id = self._next_id
        return out

    def copy(self) -> "WebDirectory":
        out = copy.deepcopy(self)
        out._adj_cache = None
        return out

    def __eq__(self, other):
        if not isinstance(other, WebDirectory):
            return NotImplemented
        return (self.root == other.root and self.depth == other.depth
                and self.categories == other.categories
                and self.cross_links == other.cross_links
                and self.cross_links_directed == other.cross_links_directed)

    __hash__ = None

    def __repr__(self):
        return (f"WebDirectory({self.category_count} categories, depth {self.depth}, "
                f"{len(self.cross_links)} cross-links)")


def new_directory(root_url: str = "/", cross_links_directed: bool = True) -> WebDirectory:
    return WebDirectory(root_url, cross_links_directed)

"""Concept-vector ontologies and the algebra over them.

An ontology is a sparse map from concept token to non-negative weight. Each
vector also carries a ``mass``: the vector's raw content is
``mass * weights``. ``sem`` returns unit weights with mass equal to the norm
of the raw term counts, and ``merge`` sums raw contents before normalising,
so merging the ontologies of two resources gives exactly the ontology of
their concatenation.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

import numpy as np

from . import kernels
from .errors import EmptyResource, MissingSemantics, ModeConditionUnmet

DEFAULT_SIM_FLOOR = 1e-6
ZERO_GAP_TOL = 1e-12


@dataclass(frozen=True, eq=True)
class ConceptVector:
    weights: Mapping[str, float] = field(default_factory=dict)
    mass: float = 1.0

    def __post_init__(self):
        clean = {}
        for tok in sorted(self.weights):
            w = float(self.weights[tok])
            if not math.isfinite(w) or w < 0:
                raise ValueError(f"weight for {tok!r} must be finite and non-negative, got {w}")
            if w > 0:
                clean[str(tok)] = w
        object.__setattr__(self, "weights", clean)
        if not math.isfinite(self.mass) or self.mass < 0:
            raise ValueError(f"mass must be finite and non-negative, got {self.mass}")
        if not clean:
            object.__setattr__(self, "mass", 0.0)

    __hash__ = None

    @classmethod
    def empty(cls) -> "ConceptVector":
        return cls({}, 0.0)

    @classmethod
    def from_counts(cls, counts: Mapping[str, float]) -> "ConceptVector":
        """Unit-normalised vector whose mass is the Euclidean norm of ``counts``."""
        raw = {t: float(c) for t, c in counts.items() if c}
        norm = _norm(raw.values())
        if norm == 0:
            return cls.empty()
        return cls({t: c / norm for t, c in raw.items()}, norm)

    @property
    def is_empty(self) -> bool:
        return not self.weights

    def norm(self) -> float:
        return _norm(self.weights.values())

    def raw(self) -> dict[str, float]:
        return {t: self.mass * w for t, w in self.weights.items()}

    def top_concept(self) -> str | None:
        if not self.weights:
            return None
        return min(self.weights, key=lambda t: (-self.weights[t], t))

    def to_dict(self) -> dict[str, float]:
        return dict(self.weights)

    def __len__(self):
        return len(self.weights)


def _norm(values: Iterable[float]) -> float:
    return math.sqrt(math.fsum(v * v for v in values))


@dataclass(frozen=True)
class Resource:
    """A Web resource reduced to its pre-tokenised concept terms."""

    id: str
    url: str
    terms: tuple[tuple[str, int], ...]

    @classmethod
    def from_terms(cls, rid: str, url: str, terms) -> "Resource":
        """Accept a token list, ``(token, count)`` pairs or a ``{token: count}`` mapping."""
        if isinstance(terms, Mapping):
            pairs = list(terms.items())
        else:
            pairs = [(t, 1) if isinstance(t, str) else (t[0], t[1]) for t in terms]
        return cls(str(rid), str(url), tuple((str(t), int(c)) for t, c in pairs))

    def counts(self) -> Counter:
        c: Counter = Counter()
        for tok, n in self.terms:
            c[tok] += n
        return c

    def concat(self, other: "Resource", rid: str | None = None) -> "Resource":
        return Resource(rid or f"{self.id}+{other.id}", self.url, self.terms + other.terms)


def sem(resource: Resource) -> ConceptVector:
    counts = {t: n for t, n in resource.counts().items() if n > 0}
    if not counts:
        raise EmptyResource(resource.id)
    return ConceptVector.from_counts(counts)


def merge(a: ConceptVector, b: ConceptVector) -> ConceptVector:
    raw = a.raw()
    for t, w in b.raw().items():
        raw[t] = raw.get(t, 0.0) + w
    return ConceptVector.from_counts(raw)


def merge_all(vectors: Iterable[ConceptVector]) -> ConceptVector:
    raw: dict[str, list[float]] = {}
    for v in vectors:
        for t, w in v.raw().items():
            raw.setdefault(t, []).append(w)
    return ConceptVector.from_counts({t: math.fsum(ws) for t, ws in raw.items()})


def diff(a: ConceptVector, b: ConceptVector) -> ConceptVector:
    """Concept-wise absolute difference of the weight maps."""
    out = {}
    for t in a.weights.keys() | b.weights.keys():
        d = abs(a.weights.get(t, 0.0) - b.weights.get(t, 0.0))
        if d > 0:
            out[t] = d
    return ConceptVector(out, 1.0)


def magnitude(v: ConceptVector) -> float:
    return v.norm()


def similarity(a: ConceptVector, b: ConceptVector) -> float:
    if a.is_empty or b.is_empty:
        return 1.0 if a.is_empty and b.is_empty else 0.0
    small, big = (a, b) if len(a) <= len(b) else (b, a)
    dot = math.fsum(w * big.weights[t] for t, w in small.weights.items() if t in big.weights)
    s = dot / (a.norm() * b.norm())
    return min(1.0, max(0.0, s))


def distance(a: ConceptVector, b: ConceptVector, sim_floor: float = DEFAULT_SIM_FLOOR) -> float:
    return 1.0 / max(similarity(a, b), sim_floor)


@dataclass(frozen=True)
class EpsilonConfig:
    epsilon: float = 0.0
    sim_floor: float = DEFAULT_SIM_FLOOR

    def __post_init__(self):
        if not (0 < self.sim_floor <= 1):
            raise ValueError("sim_floor must lie in (0, 1]")
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")


@dataclass
class SemanticsBinding:
    """Semantics attached to a directory.

    ``vectors`` holds each category's working ontology (what construction
    compares against), ``constants`` the administrator-given semantics of
    categories that may be empty, and ``resources`` the assigned ontology of
    every listed resource.
    """

    vectors: dict[int, ConceptVector] = field(default_factory=dict)
    constants: dict[int, ConceptVector] = field(default_factory=dict)
    resources: dict[str, ConceptVector] = field(default_factory=dict)

    def copy(self) -> "SemanticsBinding":
        return SemanticsBinding(dict(self.vectors), dict(self.constants), dict(self.resources))

    def missing(self, wd) -> list[int]:
        """Categories with neither a working vector nor a constant."""
        return [c for c in sorted(wd.categories) if c not in self.vectors and c not in self.constants]


class SemanticsMode(Enum):
    FROM_RESOURCES = "resources"
    FROM_CHILDREN = "children"
    CONSTANT = "constant"


def _resource_vector(binding, rid):
    try:
        return binding.resources[rid]
    except KeyError:
        raise MissingSemantics(f"resource {rid!r} has no assigned ontology") from None


def _constant(binding, cid):
    if cid in binding.constants:
        return binding.constants[cid]
    if cid in binding.vectors:
        return binding.vectors[cid]
    raise MissingSemantics(f"category {cid} has no constant semantics")


def category_semantics(wd, binding: SemanticsBinding, c: int, mode: SemanticsMode,
                       _memo: dict | None = None) -> ConceptVector:
    cat = wd[c]
    if mode is SemanticsMode.FROM_RESOURCES:
        if not cat.resources:
            raise ModeConditionUnmet(f"category {c} has no resources")
        return merge_all(_resource_vector(binding, r) for r in cat.resources)
    if mode is SemanticsMode.FROM_CHILDREN:
        if not cat.children:
            raise ModeConditionUnmet(f"category {c} has no children")
        memo = {} if _memo is None else _memo
        return merge_all(_structural(wd, binding, ch, memo) for ch in cat.children)
    if cat.resources or cat.children:
        raise ModeConditionUnmet(f"category {c} is not empty")
    return _constant(binding, c)


def _structural(wd, binding, c, memo):
    # Children-first recursion: a subtree's meaning is the aggregate of its leaves.
    if c in memo:
        return memo[c]
    cat = wd[c]
    if cat.children:
        v = category_semantics(wd, binding, c, SemanticsMode.FROM_CHILDREN, memo)
    elif cat.resources:
        v = category_semantics(wd, binding, c, SemanticsMode.FROM_RESOURCES)
    else:
        v = _constant(binding, c)
    memo[c] = v
    return v


def resolve_semantics(wd, binding: SemanticsBinding, c: int, _memo: dict | None = None) -> ConceptVector:
    """Vector used when measuring browse distances: resources, else children, else constant."""
    cat = wd[c]
    if cat.resources:
        return category_semantics(wd, binding, c, SemanticsMode.FROM_RESOURCES)
    if cat.children:
        return category_semantics(wd, binding, c, SemanticsMode.FROM_CHILDREN, _memo)
    return _constant(binding, c)


def resolve_all(wd, binding: SemanticsBinding) -> dict[int, ConceptVector]:
    memo: dict = {}
    return {c: resolve_semantics(wd, binding, c, memo) for c in sorted(wd.categories)}


def ideality_gap(wd, binding: SemanticsBinding, c: int, _memo: dict | None = None) -> float:
    cat = wd[c]
    if not cat.resources or not cat.children:
        return 0.0
    own = category_semantics(wd, binding, c, SemanticsMode.FROM_RESOURCES)
    below = category_semantics(wd, binding, c, SemanticsMode.FROM_CHILDREN, _memo)
    return magnitude(diff(own, below))


IDEAL = "ideal"
REALISTICALLY_IDEAL = "realistically ideal"
NOT_IDEAL = "not realistically ideal"


@dataclass
class IdealityReport:
    gaps: dict[int, float]
    epsilon: float
    verdict: str

    @property
    def worst(self) -> tuple[int | None, float]:
        if not self.gaps:
            return None, 0.0
        c = max(sorted(self.gaps), key=lambda k: self.gaps[k])
        return c, self.gaps[c]


def audit_ideality(wd, binding: SemanticsBinding, epsilon: float = 0.0) -> IdealityReport:
    """Gap per category and the overall verdict.

    Gaps below ``ZERO_GAP_TOL`` count as zero so that exact fixtures are not
    spoiled by rounding.
    """
    memo: dict = {}
    gaps = {c: ideality_gap(wd, binding, c, memo) for c in sorted(wd.categories)}
    worst = max(gaps.values(), default=0.0)
    if worst <= ZERO_GAP_TOL:
        verdict = IDEAL
    elif worst <= epsilon:
        verdict = REALISTICALLY_IDEAL
    else:
        verdict = NOT_IDEAL
    return IdealityReport(gaps, epsilon, verdict)


class VectorIndex:
    """Dense row-per-category copy of concept vectors for batched distance scans.

    Rows and vocabulary columns grow in place; updating a row overwrites it.
    """

    def __init__(self):
        self.ids: list[int] = []
        self.levels: list[int] = []
        self._row: dict[int, int] = {}
        self._col: dict[str, int] = {}
        self._mat = np.zeros((8, 16))
        self._norms = np.zeros(8)

    @classmethod
    def from_binding(cls, wd, binding: SemanticsBinding, exclude_root: bool = True) -> "VectorIndex":
        idx = cls()
        for cid in sorted(wd.categories):
            if exclude_root and cid == wd.root:
                continue
            v = binding.vectors.get(cid)
            if v is None:
                v = _constant(binding, cid)
            idx.upsert(cid, wd.categories[cid].level, v)
        return idx

    def __len__(self):
        return len(self.ids)

    def upsert(self, cid: int, level: int, v: ConceptVector) -> None:
        for tok in v.weights:
            if tok not in self._col:
                if len(self._col) == self._mat.shape[1]:
                    grown = np.zeros((self._mat.shape[0], 2 * self._mat.shape[1]))
                    grown[:, :self._mat.shape[1]] = self._mat
                    self._mat = grown
                self._col[tok] = len(self._col)
        row = self._row.get(cid)
        if row is None:
            row = len(self.ids)
            if row == self._mat.shape[0]:
                grown = np.zeros((2 * row, self._mat.shape[1]))
                grown[:row] = self._mat
                self._mat = grown
                self._norms = np.concatenate([self._norms, np.zeros(row)])
            self._row[cid] = row
            self.ids.append(cid)
            self.levels.append(level)
        self._mat[row] = 0.0
        for tok, w in v.weights.items():
            self._mat[row, self._col[tok]] = w
        self._norms[row] = v.norm()

    def distances(self, v: ConceptVector, sim_floor: float = DEFAULT_SIM_FLOOR) -> np.ndarray:
        k, m = len(self.ids), len(self._col)
        q = np.zeros(m)
        for tok, w in v.weights.items():
            j = self._col.get(tok)
            if j is not None:
                q[j] = w
        mat = np.ascontiguousarray(self._mat[:k, :m])
        return kernels.cosine_distances(mat, self._norms[:k].copy(), q, v.norm(), float(sim_floor))

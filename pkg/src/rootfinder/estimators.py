"""Root estimators and confidence-set selection.

Four per-vertex scores, all oriented so that lower means more root-like:

* psi  — size of the largest component left by deleting the vertex.
* phi  — log of the product of all other vertices' subtree sizes when the
         tree is rooted at the candidate (1/phi is rumor centrality).
* zeta — exact uniform-attachment likelihood objective: orbit count times
         the product of subtree-size x automorphism factors.
* xi   — the preferential-attachment analogue: zeta with the candidate's
         degree divided out.

psi and phi run in O(n) and are the at-scale estimators.  zeta and xi
re-evaluate automorphism factors per candidate root (O(n^2) worst case)
and are capped at moderate n; they are exact-likelihood tools, not bulk
ones.  Multiplicative scores live in natural-log domain throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from hashlib import blake2b

import numpy as np

from .errors import TooLargeError, UnsupportedModelError
from .generators import ModelSpec
from .isomorphism import NAIVE_ORBIT_LIMIT, aut_log, canonical_code, orbit_counts
from .trees import ShapeTree, split_sizes, subtree_sizes

__all__ = [
    "ScoreVector",
    "ConfidenceSet",
    "psi_scores",
    "phi_scores",
    "zeta_scores",
    "xi_scores",
    "score_tree",
    "select_smallest",
    "root_posterior",
    "ESTIMATOR_TAGS",
]

ESTIMATOR_TAGS = ("psi", "phi", "zeta", "xi")

# scores within this relative difference are treated as tied
TIE_RTOL = 1e-9

# tie-breaking compares full canonical codes up to here, 128-bit digests above
_EXACT_CODE_LIMIT = 10_000


@dataclass(frozen=True)
class ScoreVector:
    """Per-vertex scores for one estimator on one shape.

    ``values`` has length n+1; slot 0 is unused and holds +inf so it can
    never be selected.  psi values are exact small integers stored as
    floats; phi/zeta/xi are natural logs of the defining products.
    """

    estimator: str
    shape: ShapeTree
    values: np.ndarray

    def __post_init__(self):
        if self.estimator not in ESTIMATOR_TAGS:
            raise ValueError(f"unknown estimator {self.estimator!r}")
        vals = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", vals)
        vals.flags.writeable = False


class ConfidenceSet:
    """The min(K, n) lowest-scoring vertices.

    ``vertices`` is ordered by (score, canonical code of the rooted view,
    vertex label) ascending.  Membership tests (``v in cs``) never force
    the code-based ordering of score-tied runs that sit wholly inside the
    set, so ``in`` stays cheap on large trees; the ordered tuple is built
    on first access to ``vertices`` and cached.
    """

    __slots__ = ("estimator", "k", "_shape", "_groups", "_members", "_ordered")

    def __init__(self, estimator: str, k: int, shape: ShapeTree, groups):
        self.estimator = estimator
        self.k = k
        self._shape = shape
        # (members, ordered_flag) runs in ascending score order; unordered
        # runs still need the (code, label) sort
        self._groups = tuple((tuple(g), flag) for g, flag in groups)
        self._members = frozenset(v for g, _ in self._groups for v in g)
        self._ordered: tuple[int, ...] | None = None

    @property
    def vertices(self) -> tuple[int, ...]:
        if self._ordered is None:
            out: list[int] = []
            shape = self._shape
            for members, done in self._groups:
                if done or len(members) == 1:
                    out.extend(members)
                else:
                    out.extend(sorted(members, key=lambda u: (_tie_key(shape, u), u)))
            self._ordered = tuple(out)
        return self._ordered

    def __contains__(self, v) -> bool:
        return v in self._members

    def __len__(self) -> int:
        return len(self._members)

    def __iter__(self):
        return iter(self.vertices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConfidenceSet):
            return NotImplemented
        return (
            self.estimator == other.estimator
            and self.k == other.k
            and self.vertices == other.vertices
        )

    def __hash__(self) -> int:
        return hash((self.estimator, self.k, self.vertices))

    def __repr__(self) -> str:
        return f"ConfidenceSet(estimator={self.estimator!r}, k={self.k}, vertices={self.vertices})"


def psi_scores(shape: ShapeTree) -> ScoreVector:
    """psi(u) = largest component size after deleting u; O(n)."""
    n = shape.n
    split = split_sizes(shape)
    values = np.full(n + 1, np.inf)
    # per-vertex max over the CSR slice of outgoing component sizes
    starts = shape.xadj[1 : n + 1]
    values[1:] = np.maximum.reduceat(split.sizes, starts)
    return ScoreVector(estimator="psi", shape=shape, values=values)


def phi_scores(shape: ShapeTree) -> ScoreVector:
    """log phi(u) for all u in O(n) by rerooting along BFS edges.

    phi(root) is summed directly from subtree sizes; stepping the root to
    a child of subtree size s multiplies phi by (n - s)/s.
    """
    n = shape.n
    view = subtree_sizes(shape, 1)
    down = view.down_size
    logs = np.zeros(n + 1)
    np.log(down[1:], out=logs[1:])
    values = np.full(n + 1, np.inf)
    values[1] = float(np.sum(logs[2:]))
    up = n - down[1:].astype(np.float64)
    up[0] = 1.0  # vertex 1 is the traversal root; its entry is never read
    step = (np.log(up) - logs[1:]).tolist()  # indexed by vertex-1
    order = view.order.tolist()
    parent = view.parent.tolist()
    for v in order[1:]:
        values[v] = values[parent[v]] + step[v - 1]
    return ScoreVector(estimator="phi", shape=shape, values=values)


def _exact_score(shape: ShapeTree, degree_correction: bool) -> np.ndarray:
    """Shared zeta/xi evaluation: per-root subtree-size and Aut products."""
    n = shape.n
    if n > NAIVE_ORBIT_LIMIT:
        raise TooLargeError(
            f"exact-likelihood scores are capped at n={NAIVE_ORBIT_LIMIT} (got n={n})"
        )
    orbit = orbit_counts(shape)
    values = np.full(n + 1, np.inf)
    log_orbit = np.log(orbit[1:].astype(np.float64))
    log_deg = np.log(shape.degrees()[1:].astype(np.float64)) if degree_correction else None
    for u in range(1, n + 1):
        down = subtree_sizes(shape, u).down_size
        total = float(np.sum(np.log(down[1:]))) + float(np.sum(aut_log(shape, u)[1:]))
        values[u] = total + log_orbit[u - 1]
        if degree_correction:
            values[u] -= log_deg[u - 1]
    return values


def zeta_scores(shape: ShapeTree) -> ScoreVector:
    """log zeta(u): orbit count times product over v of size(v) * Aut(v).

    The defining product runs over non-leaves; leaves contribute log 1
    twice, so the implementation sums over all vertices.
    """
    return ScoreVector(estimator="zeta", shape=shape, values=_exact_score(shape, False))


def xi_scores(shape: ShapeTree) -> ScoreVector:
    """log xi(u) = log zeta(u) - log degree(u)."""
    return ScoreVector(estimator="xi", shape=shape, values=_exact_score(shape, True))


_SCORE_FNS = {
    "psi": psi_scores,
    "phi": phi_scores,
    "zeta": zeta_scores,
    "xi": xi_scores,
}


def score_tree(shape: ShapeTree, estimator: str) -> ScoreVector:
    """Dispatch by estimator tag."""
    try:
        fn = _SCORE_FNS[estimator]
    except KeyError:
        raise ValueError(f"unknown estimator {estimator!r}; expected one of {ESTIMATOR_TAGS}")
    return fn(shape)


def _tie_key(shape: ShapeTree, u: int):
    code = canonical_code(shape, u)
    if shape.n > _EXACT_CODE_LIMIT:
        return blake2b(code, digest_size=16).digest()
    return code


def select_smallest(scores: ScoreVector, k: int) -> ConfidenceSet:
    """The min(k, n) lowest-scoring vertices, deterministically ordered.

    Order is (score, canonical code of the tree rooted at the vertex,
    vertex label): equal-score runs that reach the output are re-sorted by
    rooted-isomorphism class, so label order only ever separates vertices
    whose rooted views are isomorphic.  Only a run that straddles the k-th
    rank is code-sorted here (its members compete for the remaining
    slots); runs that fit entirely are ordered lazily by ``vertices``.
    """
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    shape = scores.shape
    n = shape.n
    m = min(k, n)
    ranked = (np.argsort(scores.values[1:], kind="stable") + 1).tolist()
    vals = scores.values[ranked].tolist()  # aligned with ranked

    def tied(a: float, b: float) -> bool:
        return abs(a - b) <= TIE_RTOL * max(1.0, abs(a), abs(b))

    groups: list[tuple[list[int], bool]] = []
    count = 0
    i = 0
    while count < m:
        # peel off the maximal run of tied scores starting at rank i
        j = i + 1
        while j < n and tied(vals[j], vals[j - 1]):
            j += 1
        cluster = ranked[i:j]
        need = m - count
        if len(cluster) > need:
            cluster.sort(key=lambda u: (_tie_key(shape, u), u))
            groups.append((cluster[:need], True))
            count = m
        else:
            groups.append((cluster, False))
            count += len(cluster)
        i = j
    return ConfidenceSet(scores.estimator, k, shape, groups)


def root_posterior(shape: ShapeTree, model: ModelSpec) -> np.ndarray:
    """Posterior root probabilities: p(u) proportional to 1/zeta(u) under
    uniform attachment, 1/xi(u) under preferential attachment.

    Normalized by log-sum-exp; returns an array of length n+1 whose slot 0
    is 0.  Only the two attachment rules with an exact likelihood are
    supported; other alpha values raise UnsupportedModelError.
    """
    if model.kind == "uniform" or (model.kind == "alpha" and model.alpha == 0.0):
        vec = zeta_scores(shape)
    elif model.kind == "preferential" or (model.kind == "alpha" and model.alpha == 1.0):
        vec = xi_scores(shape)
    else:
        raise UnsupportedModelError(
            f"posterior is defined only for alpha in {{0, 1}}, got {model.label}"
        )
    w = -vec.values[1:]
    w = w - np.max(w)
    p = np.exp(w)
    p /= p.sum()
    out = np.zeros(shape.n + 1)
    out[1:] = p
    return out

"""Tree representations and subtree-size machinery.

Two views of a tree on vertices 1..n:

* :class:`GrowthTree` — the chronologically labeled tree produced by an
  attachment process, stored as a parent array with ``parent[i] < i``.
* :class:`ShapeTree` — an unlabeled observed tree; labels 1..n are opaque.
  Adjacency is stored CSR-style in two flat arrays so traversals stay
  iterative and survive path graphs of a million vertices.

All structures are immutable after construction and safe to share across
worker processes.  :func:`split_sizes` is the one primitive that computes
component sizes for every ordered edge; the estimators build on it rather
than re-deriving sizes themselves.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadSizeError,
    CycleOrDisconnectedError,
    DuplicateEdgeError,
    SelfLoopError,
)
from .rng import as_generator

__all__ = [
    "GrowthTree",
    "ShapeTree",
    "RootedView",
    "EdgeSplit",
    "build_shape",
    "shape_of_growth",
    "forget_labels",
    "subtree_sizes",
    "split_sizes",
    "read_edge_list",
    "write_edge_list",
    "read_growth",
    "write_growth",
]


@dataclass(frozen=True)
class GrowthTree:
    """Chronologically labeled tree: vertex i+1 attached to ``parent[i+1]``.

    ``parent`` has length n+1; slots 0 and 1 are unused (vertex 1 is the
    root/first vertex).  ``parent[i] < i`` for every i in 2..n, which is
    exactly the increasing-labeling property.
    """

    parent: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.parent, dtype=np.int64)
        object.__setattr__(self, "parent", p)
        n = p.shape[0] - 1
        if n < 2:
            raise BadSizeError(f"growth tree needs at least 2 vertices, got n={n}")
        idx = np.arange(2, n + 1)
        if np.any(p[2:] < 1) or np.any(p[2:] >= idx):
            raise ValueError("parent[i] must lie in 1..i-1 for every i in 2..n")
        p.flags.writeable = False

    @classmethod
    def from_attachments(cls, parents: Sequence[int]) -> "GrowthTree":
        """Build from the attachment list ``parents[j] = parent of vertex j+2``."""
        p = np.zeros(len(parents) + 2, dtype=np.int64)
        p[2:] = parents
        return cls(p)

    @property
    def n(self) -> int:
        return self.parent.shape[0] - 1

    def edges(self) -> list[tuple[int, int]]:
        return [(int(self.parent[i]), i) for i in range(2, self.n + 1)]

    def degrees(self) -> np.ndarray:
        """Degree of each vertex (index 0 unused)."""
        deg = np.bincount(self.parent[2:], minlength=self.n + 1)
        deg[2:] += 1  # every vertex but 1 has a parent edge
        return deg

    def degree_of(self, v: int) -> int:
        return int(self.degrees()[v])


@dataclass(frozen=True)
class ShapeTree:
    """Unlabeled tree in CSR adjacency form.

    Neighbors of v are ``adjncy[xadj[v]:xadj[v+1]]``; ``xadj`` has length
    n+2 with slot 0 unused.  Labels carry no chronological meaning.
    """

    xadj: np.ndarray
    adjncy: np.ndarray

    def __post_init__(self):
        xa = np.asarray(self.xadj, dtype=np.int64)
        ad = np.asarray(self.adjncy, dtype=np.int64)
        object.__setattr__(self, "xadj", xa)
        object.__setattr__(self, "adjncy", ad)
        xa.flags.writeable = False
        ad.flags.writeable = False

    @property
    def n(self) -> int:
        return self.xadj.shape[0] - 2

    def neighbors(self, v: int) -> np.ndarray:
        return self.adjncy[self.xadj[v] : self.xadj[v + 1]]

    def degrees(self) -> np.ndarray:
        """Degree array indexed by vertex (index 0 unused, set to 0)."""
        out = np.zeros(self.n + 1, dtype=np.int64)
        out[1:] = np.diff(self.xadj[1:])
        return out

    def degree_of(self, v: int) -> int:
        return int(self.xadj[v + 1] - self.xadj[v])

    def edges(self) -> list[tuple[int, int]]:
        """Undirected edges as (min, max) pairs, sorted."""
        out = []
        for v in range(1, self.n + 1):
            for w in self.neighbors(v):
                if v < w:
                    out.append((v, int(w)))
        return sorted(out)


@dataclass(frozen=True)
class RootedView:
    """A ShapeTree oriented away from a chosen root.

    ``order`` lists vertices in BFS order (root first); ``parent`` maps each
    vertex to its BFS parent (0 for the root); ``down_size[v]`` is the size
    of the subtree hanging below v, so ``down_size[root] == n``.
    """

    shape: ShapeTree
    root: int
    order: np.ndarray
    parent: np.ndarray
    down_size: np.ndarray

    def __post_init__(self):
        for name in ("order", "parent", "down_size"):
            arr = np.asarray(getattr(self, name), dtype=np.int64)
            object.__setattr__(self, name, arr)
            arr.flags.writeable = False

    @cached_property
    def children(self) -> list[list[int]]:
        """Child lists indexed by vertex (index 0 unused)."""
        kids: list[list[int]] = [[] for _ in range(self.shape.n + 1)]
        par = self.parent.tolist()
        for v in self.order.tolist()[1:]:
            kids[par[v]].append(v)
        return kids

    @cached_property
    def leaves(self) -> frozenset[int]:
        """Vertices with no children in the rooted orientation."""
        counts = np.bincount(self.parent[self.order[1:]], minlength=self.shape.n + 1)
        return frozenset(int(v) for v in range(1, self.shape.n + 1) if counts[v] == 0)


@dataclass(frozen=True)
class EdgeSplit:
    """Component sizes for every ordered edge of a ShapeTree.

    ``sizes`` is aligned with ``shape.adjncy``: if slot k of u's adjacency
    holds v, then ``sizes[k]`` is the size of the component containing v
    after deleting u — i.e. the subtree of v when the tree is rooted at u.
    """

    shape: ShapeTree
    sizes: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.sizes, dtype=np.int64)
        object.__setattr__(self, "sizes", s)
        s.flags.writeable = False

    def toward(self, u: int) -> np.ndarray:
        """Sizes aligned with ``shape.neighbors(u)``."""
        return self.sizes[self.shape.xadj[u] : self.shape.xadj[u + 1]]

    def size(self, u: int, v: int) -> int:
        """size(u -> v) for the edge {u, v}."""
        sl = self.shape.xadj[u], self.shape.xadj[u + 1]
        nb = self.shape.adjncy[sl[0] : sl[1]]
        hit = np.nonzero(nb == v)[0]
        if hit.size == 0:
            raise ValueError(f"({u}, {v}) is not an edge")
        return int(self.sizes[sl[0] + hit[0]])


# ---------------------------------------------------------------------------
# Construction and validation
# ---------------------------------------------------------------------------


def _csr_from_endpoints(src: np.ndarray, dst: np.ndarray, n: int) -> ShapeTree:
    """Build CSR adjacency from directed endpoint arrays (both directions given)."""
    deg = np.bincount(src, minlength=n + 1)
    xadj = np.zeros(n + 2, dtype=np.int64)
    np.cumsum(deg[1:], out=xadj[2:])
    order = np.argsort(src, kind="stable")
    return ShapeTree(xadj=xadj, adjncy=dst[order])


def build_shape(edges: Iterable[tuple[int, int]]) -> ShapeTree:
    """Validate an edge list and return the ShapeTree.

    Vertex identifiers must be the integers 1..n.  Raises SelfLoopError,
    DuplicateEdgeError, or CycleOrDisconnectedError for non-trees.
    """
    pairs = [(int(a), int(b)) for a, b in edges]
    if not pairs:
        raise CycleOrDisconnectedError("empty edge list does not define a tree (n >= 2)")
    arr = np.asarray(pairs, dtype=np.int64)
    if np.any(arr < 1):
        raise ValueError("vertex identifiers must be positive integers")
    if np.any(arr[:, 0] == arr[:, 1]):
        raise SelfLoopError("edge joins a vertex to itself")
    canon = {tuple(sorted(p)) for p in pairs}
    if len(canon) != len(pairs):
        raise DuplicateEdgeError("duplicate undirected edge")
    n = int(arr.max())
    if len(pairs) != n - 1:
        raise CycleOrDisconnectedError(f"{len(pairs)} edges on {n} vertices is not a tree")
    src = np.concatenate([arr[:, 0], arr[:, 1]])
    dst = np.concatenate([arr[:, 1], arr[:, 0]])
    shape = _csr_from_endpoints(src, dst, n)
    order, _ = _bfs(shape, 1)
    if len(order) != n:
        raise CycleOrDisconnectedError("edge set is cyclic or disconnected")
    return shape


def shape_of_growth(t: GrowthTree) -> ShapeTree:
    """The shape of a growth tree with labels kept as-is (no shuffling)."""
    n = t.n
    kids = np.arange(2, n + 1, dtype=np.int64)
    pars = t.parent[2:]
    return _csr_from_endpoints(
        np.concatenate([kids, pars]), np.concatenate([pars, kids]), n
    )


def forget_labels(t: GrowthTree, rng=None, permutation=None):
    """Relabel a GrowthTree with a uniformly random permutation.

    Returns ``(shape, true_root)`` where ``true_root`` is the new identity
    of original vertex 1.  Pass ``permutation`` (a sequence mapping old
    label i to ``permutation[i-1]``) to fix the relabeling explicitly,
    e.g. the identity for tests.
    """
    n = t.n
    if permutation is not None:
        perm = np.asarray(permutation, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(1, n + 1)):
            raise ValueError("permutation must rearrange 1..n")
    else:
        if rng is None:
            raise ValueError("need an rng or an explicit permutation")
        gen = as_generator(rng)
        perm = gen.permutation(np.arange(1, n + 1))
    relabel = np.zeros(n + 1, dtype=np.int64)
    relabel[1:] = perm
    kids = relabel[np.arange(2, n + 1)]
    pars = relabel[t.parent[2:]]
    shape = _csr_from_endpoints(
        np.concatenate([kids, pars]), np.concatenate([pars, kids]), n
    )
    return shape, int(relabel[1])


# ---------------------------------------------------------------------------
# Traversal
# ---------------------------------------------------------------------------


def _bfs(shape: ShapeTree, root: int) -> tuple[list[int], list[int]]:
    """Iterative BFS; returns (order, parent) as plain lists.

    parent[root] is 0.  Only the component containing root is visited.
    """
    n = shape.n
    xa = shape.xadj.tolist()
    ad = shape.adjncy.tolist()
    parent = [0] * (n + 1)
    seen = bytearray(n + 1)
    seen[root] = 1
    order = [root]
    head = 0
    while head < len(order):
        u = order[head]
        head += 1
        for k in range(xa[u], xa[u + 1]):
            v = ad[k]
            if not seen[v]:
                seen[v] = 1
                parent[v] = u
                order.append(v)
    return order, parent


def _down_sizes(order: list[int], parent: list[int], n: int) -> list[int]:
    """Subtree sizes by one reverse sweep of the BFS order."""
    down = [1] * (n + 1)
    down[0] = 0
    for i in range(len(order) - 1, 0, -1):
        v = order[i]
        down[parent[v]] += down[v]
    return down


def subtree_sizes(shape: ShapeTree, root: int) -> RootedView:
    """Orient the tree away from ``root`` and compute all subtree sizes."""
    n = shape.n
    if not (1 <= root <= n):
        raise ValueError(f"root {root} out of range 1..{n}")
    order, parent = _bfs(shape, root)
    down = _down_sizes(order, parent, n)
    return RootedView(
        shape=shape,
        root=root,
        order=np.asarray(order, dtype=np.int64),
        parent=np.asarray(parent, dtype=np.int64),
        down_size=np.asarray(down, dtype=np.int64),
    )


def split_sizes(shape: ShapeTree) -> EdgeSplit:
    """Component size for every ordered edge, in O(n) total.

    One rooted traversal gives subtree sizes; the reverse direction of each
    edge is n minus the forward size.
    """
    n = shape.n
    view = subtree_sizes(shape, 1)
    down = view.down_size
    parent = view.parent
    owner = np.repeat(np.arange(1, n + 1, dtype=np.int64), shape.degrees()[1:])
    nb = shape.adjncy
    sizes = np.where(parent[nb] == owner, down[nb], n - down[owner])
    return EdgeSplit(shape=shape, sizes=sizes)


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------


def read_edge_list(path) -> ShapeTree:
    """Edge-list text: one edge per line, two whitespace-separated positive
    integers; lines starting with '#' (and blank lines) are ignored."""
    edges = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        a, b = line.split()
        edges.append((int(a), int(b)))
    return build_shape(edges)


def write_edge_list(shape: ShapeTree, path) -> None:
    lines = [f"{u} {v}" for u, v in shape.edges()]
    Path(path).write_text("\n".join(lines) + "\n")


def read_growth(path) -> GrowthTree:
    """GrowthTree file: header line "n", then n-1 lines "i parent[i]"."""
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    n = int(lines[0])
    parent = np.zeros(n + 1, dtype=np.int64)
    if len(lines) - 1 != n - 1:
        raise ValueError(f"expected {n - 1} parent lines, found {len(lines) - 1}")
    for ln in lines[1:]:
        i, p = ln.split()
        parent[int(i)] = int(p)
    return GrowthTree(parent)


def write_growth(t: GrowthTree, path) -> None:
    lines = [str(t.n)]
    lines += [f"{i} {int(t.parent[i])}" for i in range(2, t.n + 1)]
    Path(path).write_text("\n".join(lines) + "\n")

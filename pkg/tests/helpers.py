"""Brute-force oracles shared across test modules.

Everything here is exponential-time and intended for n <= 6 (permutation
searches) or small enumerations; tests use these as independent routes to
the same quantities the library computes cleverly.
"""

from itertools import permutations

from rootfinder import canonical_code, shape_of_growth
from rootfinder.oracle import enumerate_recursive


def edge_set(shape):
    return frozenset(map(frozenset, shape.edges()))


def brute_rooted_isomorphic(shape_a, root_a, shape_b, root_b):
    """Exhaustive permutation search for rooted isomorphism."""
    n = shape_a.n
    if shape_b.n != n:
        return False
    ea, eb = edge_set(shape_a), edge_set(shape_b)
    for perm in permutations(range(1, n + 1)):
        sigma = {i + 1: perm[i] for i in range(n)}
        if sigma[root_a] != root_b:
            continue
        if frozenset(frozenset(sigma[v] for v in e) for e in ea) == eb:
            return True
    return False


def brute_automorphism_count(shape, fixed_root=None):
    """Count edge-preserving permutations, optionally fixing one vertex."""
    n = shape.n
    e = edge_set(shape)
    hits = 0
    for perm in permutations(range(1, n + 1)):
        sigma = {i + 1: perm[i] for i in range(n)}
        if fixed_root is not None and sigma[fixed_root] != fixed_root:
            continue
        if frozenset(frozenset(sigma[v] for v in ed) for ed in e) == e:
            hits += 1
    return hits


def distinct_shapes(n, limit=None):
    """Pairwise non-isomorphic shapes among all recursive trees on n vertices."""
    out = []
    seen = set()
    for t in enumerate_recursive(n):
        shape = shape_of_growth(t)
        key = min(canonical_code(shape, u) for u in range(1, n + 1))
        if key not in seen:
            seen.add(key)
            out.append(shape)
            if limit and len(out) >= limit:
                break
    return out

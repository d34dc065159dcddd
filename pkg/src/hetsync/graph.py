"""Undirected unweighted communication graphs and their spectral quantities.

Graphs are small (tens of nodes): everything is dense numpy and exact
enumeration where exactness matters for certification.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

#: Largest node count for which minimum_density will enumerate bipartitions.
DENSITY_ENUMERATION_LIMIT = 20


class GraphValidationError(ValueError):
    """Raised when a graph description violates the structural invariants."""


@dataclass(frozen=True)
class Graph:
    """Undirected unweighted graph on nodes 0..node_count-1.

    ``edges`` is a sorted tuple of (i, j) pairs with i < j; construction goes
    through :func:`build_graph`, which validates and normalizes.
    """

    node_count: int
    edges: tuple[tuple[int, int], ...]

    @property
    def edge_count(self) -> int:
        return len(self.edges)


def build_graph(node_count: int, edges) -> Graph:
    """Validate and normalize an edge list into a :class:`Graph`.

    Rejects self-loops, duplicate edges (in either orientation) and
    out-of-range endpoints, naming the offending edge.
    """
    if not isinstance(node_count, (int, np.integer)) or node_count < 1:
        raise GraphValidationError(f"node_count must be a positive integer, got {node_count!r}")
    seen: set[tuple[int, int]] = set()
    normalized = []
    for edge in edges:
        try:
            i, j = edge
            i, j = int(i), int(j)
        except (TypeError, ValueError):
            raise GraphValidationError(f"edge {edge!r} is not a pair of node indices") from None
        if i == j:
            raise GraphValidationError(f"self-loop edge ({i}, {j})")
        if not (0 <= i < node_count and 0 <= j < node_count):
            raise GraphValidationError(f"edge ({i}, {j}) out of range for {node_count} nodes")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise GraphValidationError(f"duplicate edge ({i}, {j})")
        seen.add(key)
        normalized.append(key)
    return Graph(int(node_count), tuple(sorted(normalized)))


def complete_graph(node_count: int) -> Graph:
    """All-to-all graph K_N."""
    return build_graph(node_count, combinations(range(node_count), 2))


def adjacency(g: Graph) -> np.ndarray:
    a = np.zeros((g.node_count, g.node_count))
    for i, j in g.edges:
        a[i, j] = a[j, i] = 1.0
    return a


def laplacian(g: Graph) -> np.ndarray:
    """Graph Laplacian L = D - A (symmetric, PSD, zero row sums)."""
    a = adjacency(g)
    return np.diag(a.sum(axis=1)) - a


def incidence(g: Graph) -> np.ndarray:
    """Node-by-edge incidence matrix B with B @ B.T == laplacian(g).

    Columns follow the sorted edge order; the lower-indexed endpoint gets +1,
    so the output is deterministic.
    """
    b = np.zeros((g.node_count, g.edge_count))
    for col, (i, j) in enumerate(g.edges):
        b[i, col] = 1.0
        b[j, col] = -1.0
    return b


def is_connected(g: Graph) -> bool:
    """True iff the graph has a single connected component."""
    if g.node_count == 1:
        return True
    neighbors: list[list[int]] = [[] for _ in range(g.node_count)]
    for i, j in g.edges:
        neighbors[i].append(j)
        neighbors[j].append(i)
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v in neighbors[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == g.node_count


def algebraic_connectivity(g: Graph) -> float:
    """Second-smallest Laplacian eigenvalue (Fiedler value).

    Exactly 0.0 for disconnected graphs and for the single-node graph, so
    ``algebraic_connectivity(g) > 0`` iff ``is_connected(g)`` for N >= 2.
    """
    if g.node_count == 1 or not is_connected(g):
        return 0.0
    eigenvalues = np.linalg.eigvalsh(laplacian(g))
    return float(eigenvalues[1])


def minimum_density(g: Graph, enumeration_limit: int = DENSITY_ENUMERATION_LIMIT) -> float:
    """Minimum over bipartitions (S, V\\S) of N*cut(S) / (2*|S|*(N-|S|)).

    Exhaustive enumeration of the 2^(N-1)-1 bipartitions; exact, hence the
    node-count limit. Equals N/2 for complete graphs.
    """
    n = g.node_count
    if n < 2:
        raise GraphValidationError("minimum density needs at least 2 nodes")
    if not is_connected(g):
        raise GraphValidationError("minimum density is undefined for disconnected graphs")
    if n > enumeration_limit:
        raise GraphValidationError(
            f"enumeration limit exceeded: {n} nodes > limit {enumeration_limit}"
        )
    a = adjacency(g)
    best = np.inf
    # Fix node 0 on the S side: each bipartition is visited exactly once.
    members = np.arange(n - 1) + 1
    for mask in range(2 ** (n - 1)):
        side = np.zeros(n, dtype=bool)
        side[0] = True
        side[members[(mask >> np.arange(n - 1)) & 1 == 1]] = True
        k = int(side.sum())
        if k == n:
            continue
        cut = float(a[side][:, ~side].sum())
        best = min(best, n * cut / (2.0 * k * (n - k)))
    return best

"""Immutable undirected simple graphs with BFS neighborhood primitives.

Vertices are 0..n-1. Adjacency is stored in CSR form (indptr/indices) with
each neighbor list sorted, so membership tests are binary searches and set
operations on edge keys are linear scans.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InputError


class Graph:
    """Undirected simple graph; immutable after construction.

    Removed/absent vertices keep their ids (they are simply isolated), so
    permutation indices stay stable across vertex removals.
    """

    __slots__ = ("n", "indptr", "indices", "_keys")

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray):
        self.n = int(n)
        self.indptr = indptr
        self.indices = indices
        self._keys: np.ndarray | None = None
        indptr.setflags(write=False)
        indices.setflags(write=False)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        if n < 0:
            raise InputError("vertex count must be nonnegative")
        pairs = np.asarray(list(edges), dtype=np.int64)
        if pairs.size == 0:
            pairs = pairs.reshape(0, 2)
        if pairs.ndim != 2 or pairs.shape[1] != 2:
            raise InputError("edges must be pairs of vertex ids")
        u, v = pairs[:, 0], pairs[:, 1]
        if pairs.size and (pairs.min() < 0 or pairs.max() >= n):
            raise InputError("edge endpoint out of range")
        if np.any(u == v):
            raise InputError("self-loops are not allowed")
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        keys = np.unique(lo * n + hi) if n > 0 else lo
        return cls._from_keys(n, keys)

    @classmethod
    def _from_keys(cls, n: int, keys: np.ndarray) -> "Graph":
        """Build from sorted unique edge keys lo*n+hi (lo < hi)."""
        lo = keys // n if n else keys
        hi = keys % n if n else keys
        ends = np.concatenate([lo, hi])
        other = np.concatenate([hi, lo])
        order = np.lexsort((other, ends))
        indices = other[order]
        counts = np.bincount(ends, minlength=n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        g = cls(n, indptr, indices.astype(np.int64))
        g._keys = keys.astype(np.int64)
        return g

    # -- basic queries ----------------------------------------------------

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u] : self.indptr[u + 1]]

    def degree(self, u: int) -> int:
        return int(self.indptr[u + 1] - self.indptr[u])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def num_edges(self) -> int:
        return len(self.indices) // 2

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        i = np.searchsorted(row, v)
        return i < len(row) and row[i] == v

    def edge_keys(self) -> np.ndarray:
        """Sorted int64 keys lo*n+hi for every edge (lo < hi)."""
        if self._keys is None:
            lo = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees())
            hi = self.indices
            mask = lo < hi
            self._keys = lo[mask] * self.n + hi[mask]
        return self._keys

    def edges(self) -> Iterator[tuple[int, int]]:
        for k in self.edge_keys():
            yield int(k // self.n), int(k % self.n)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and np.array_equal(self.edge_keys(), other.edge_keys())
        )

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges})"

    # -- BFS primitives ---------------------------------------------------

    def distances_from(
        self,
        u: int,
        max_depth: int | None = None,
        blocked: Sequence[int] | None = None,
    ) -> np.ndarray:
        """BFS distances from u (-1 for unreached), optionally truncated.

        Vertices in `blocked` are treated as deleted; if u itself is blocked
        only u (distance 0) is reached.
        """
        if not 0 <= u < self.n:
            raise InputError(f"vertex {u} out of range")
        dist = np.full(self.n, -1, dtype=np.int64)
        dist[u] = 0
        blocked_mask = None
        if blocked is not None:
            blocked_arr = np.asarray(list(blocked), dtype=np.int64)
            if blocked_arr.size:
                if blocked_arr.min() < 0 or blocked_arr.max() >= self.n:
                    raise InputError("blocked vertex out of range")
                blocked_mask = np.zeros(self.n, dtype=bool)
                blocked_mask[blocked_arr] = True
                if blocked_mask[u]:
                    return dist
        frontier = [u]
        depth = 0
        while frontier and (max_depth is None or depth < max_depth):
            depth += 1
            nxt: list[int] = []
            for w in frontier:
                for x in self.neighbors(w):
                    if dist[x] < 0 and (blocked_mask is None or not blocked_mask[x]):
                        dist[x] = depth
                        nxt.append(int(x))
            frontier = nxt
        return dist


def build_graph(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Validating constructor: rejects out-of-range endpoints and self-loops."""
    return Graph.from_edges(n, edges)


def gamma_k(
    g: Graph, u: int, k: int, blocked: Sequence[int] | None = None
) -> np.ndarray:
    """Vertices at shortest-path distance exactly k from u, sorted."""
    if k < 0:
        raise InputError("hop count must be nonnegative")
    dist = g.distances_from(u, max_depth=k, blocked=blocked)
    return np.flatnonzero(dist == k)


def n_k(g: Graph, u: int, k: int, blocked: Sequence[int] | None = None) -> np.ndarray:
    """Vertices within distance k from u (includes u), sorted."""
    if k < 0:
        raise InputError("hop count must be nonnegative")
    dist = g.distances_from(u, max_depth=k, blocked=blocked)
    return np.flatnonzero(dist >= 0)


def remove_vertices(g: Graph, s: Iterable[int]) -> Graph:
    """Delete all edges incident to s; ids are kept (vertices become isolated)."""
    drop = np.asarray(sorted(set(int(x) for x in s)), dtype=np.int64)
    if drop.size == 0:
        return g
    if drop.min() < 0 or drop.max() >= g.n:
        raise InputError("vertex to remove out of range")
    keys = g.edge_keys()
    lo, hi = keys // g.n, keys % g.n
    mask = np.zeros(g.n, dtype=bool)
    mask[drop] = True
    keep = ~(mask[lo] | mask[hi])
    return Graph._from_keys(g.n, keys[keep])


def _require_same_n(g1: Graph, g2: Graph) -> None:
    if g1.n != g2.n:
        raise InputError("graphs must have the same vertex count")


def graph_and(g1: Graph, g2: Graph) -> Graph:
    """Edge-wise intersection of two graphs on the same vertex set."""
    _require_same_n(g1, g2)
    keys = np.intersect1d(g1.edge_keys(), g2.edge_keys(), assume_unique=True)
    return Graph._from_keys(g1.n, keys)


def graph_or(g1: Graph, g2: Graph) -> Graph:
    """Edge-wise union of two graphs on the same vertex set."""
    _require_same_n(g1, g2)
    keys = np.union1d(g1.edge_keys(), g2.edge_keys())
    return Graph._from_keys(g1.n, keys)


def relabel(g: Graph, forward: np.ndarray) -> Graph:
    """Graph with every vertex i renamed to forward[i]."""
    keys = g.edge_keys()
    lo, hi = forward[keys // g.n], forward[keys % g.n]
    new_keys = np.minimum(lo, hi) * g.n + np.maximum(lo, hi)
    new_keys.sort()
    return Graph._from_keys(g.n, new_keys)


# -- edge-list text format: first line "n m", then m lines "u v" ----------


def write_edgelist(g: Graph, path) -> None:
    with open(path, "w") as f:
        f.write(f"{g.n} {g.num_edges}\n")
        for u, v in g.edges():
            f.write(f"{u} {v}\n")


def read_edgelist(path) -> Graph:
    with open(path) as f:
        header = f.readline().split()
        if len(header) != 2:
            raise InputError(f"{path}: expected header 'n m'")
        n, m = int(header[0]), int(header[1])
        edges = []
        for line in f:
            line = line.strip()
            if not line:
                continue
            a, b = line.split()
            edges.append((int(a), int(b)))
    if len(edges) != m:
        raise InputError(f"{path}: expected {m} edges, found {len(edges)}")
    return build_graph(n, edges)

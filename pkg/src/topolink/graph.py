"""Undirected simple graphs: edge-list I/O, CSR adjacency, bounded BFS."""
from __future__ import annotations

import logging
from typing import IO, Iterable, Optional

import numpy as np

logger = logging.getLogger(__name__)


class Graph:
    """Immutable undirected simple graph over dense integer node ids.

    Nodes are ``0..num_nodes-1``. Edges are stored once as (u, v) with
    u < v, lexicographically sorted, plus a CSR adjacency structure with
    sorted neighbor lists. Instances must not be mutated after
    construction; all query methods are safe for concurrent use.
    """

    __slots__ = (
        "num_nodes",
        "edge_array",
        "indptr",
        "indices",
        "degree",
        "dropped_self_loops",
        "_edge_keys",
    )

    def __init__(self, num_nodes: int, edge_array: np.ndarray,
                 indptr: np.ndarray, indices: np.ndarray, degree: np.ndarray,
                 dropped_self_loops: int = 0):
        self.num_nodes = int(num_nodes)
        self.edge_array = edge_array
        self.indptr = indptr
        self.indices = indices
        self.degree = degree
        self.dropped_self_loops = dropped_self_loops
        self._edge_keys: Optional[frozenset] = None
        for arr in (edge_array, indptr, indices, degree):
            arr.setflags(write=False)

    # -- construction ------------------------------------------------

    @classmethod
    def from_edges(cls, num_nodes: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Build a graph from an edge iterable.

        Self-loops are dropped (counted in ``dropped_self_loops``) and
        duplicate / reversed-duplicate pairs are collapsed.
        """
        num_nodes = int(num_nodes)
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                         dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, 2)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("edges must be pairs of node ids")
        if arr.size and (arr.min() < 0 or arr.max() >= num_nodes):
            raise ValueError("edge endpoint out of range")
        loops = arr[:, 0] == arr[:, 1]
        n_loops = int(loops.sum())
        arr = arr[~loops]
        u = np.minimum(arr[:, 0], arr[:, 1])
        v = np.maximum(arr[:, 0], arr[:, 1])
        keys = np.unique(u * num_nodes + v)
        canonical = np.stack([keys // num_nodes, keys % num_nodes], axis=1)
        return cls._from_canonical(num_nodes, canonical, dropped_self_loops=n_loops)

    @classmethod
    def _from_canonical(cls, num_nodes: int, edge_array: np.ndarray,
                        dropped_self_loops: int = 0) -> "Graph":
        # edge_array must already be unique, u < v, lexicographically sorted
        edge_array = np.ascontiguousarray(edge_array, dtype=np.int64)
        m = edge_array.shape[0]
        if m:
            endpoints = np.concatenate([edge_array[:, 0], edge_array[:, 1]])
            others = np.concatenate([edge_array[:, 1], edge_array[:, 0]])
            order = np.lexsort((others, endpoints))
            indices = others[order].astype(np.int32)
            degree = np.bincount(endpoints, minlength=num_nodes).astype(np.int64)
        else:
            indices = np.empty(0, dtype=np.int32)
            degree = np.zeros(num_nodes, dtype=np.int64)
        indptr = np.zeros(num_nodes + 1, dtype=np.int64)
        np.cumsum(degree, out=indptr[1:])
        return cls(num_nodes, edge_array, indptr, indices, degree,
                   dropped_self_loops=dropped_self_loops)

    def __repr__(self) -> str:
        return f"Graph(num_nodes={self.num_nodes}, num_edges={self.num_edges})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, Graph)
                and self.num_nodes == other.num_nodes
                and np.array_equal(self.edge_array, other.edge_array))

    # -- queries -----------------------------------------------------

    @property
    def num_edges(self) -> int:
        return self.edge_array.shape[0]

    def neighbors(self, node: int) -> np.ndarray:
        """Sorted neighbor ids of ``node`` (read-only view)."""
        return self.indices[self.indptr[node]:self.indptr[node + 1]]

    @property
    def edge_keys(self) -> frozenset:
        """Set of packed edge keys u*num_nodes+v (u < v) for membership tests."""
        if self._edge_keys is None:
            packed = self.edge_array[:, 0] * self.num_nodes + self.edge_array[:, 1]
            self._edge_keys = frozenset(packed.tolist())
        return self._edge_keys

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return False
        a, b = (u, v) if u < v else (v, u)
        return a * self.num_nodes + b in self.edge_keys

    def edges(self) -> list[tuple[int, int]]:
        """Edges as a sorted list of (u, v) tuples with u < v."""
        return [tuple(e) for e in self.edge_array.tolist()]


def _bfs_levels(graph: Graph, source: int, max_depth: Optional[int] = None,
                skip_edge: Optional[tuple[int, int]] = None) -> np.ndarray:
    """Hop distances from ``source`` as an int array (-1 = beyond reach).

    ``skip_edge`` excludes one undirected edge from traversal without
    copying the graph.
    """
    n = graph.num_nodes
    if n <= 512:
        return _bfs_levels_small(graph, source, max_depth, skip_edge)
    levels = np.full(n, -1, dtype=np.int64)
    levels[source] = 0
    frontier = np.array([source], dtype=np.int64)
    depth = 0
    indptr, indices = graph.indptr, graph.indices
    while frontier.size and (max_depth is None or depth < max_depth):
        starts = indptr[frontier]
        counts = indptr[frontier + 1] - starts
        total = int(counts.sum())
        if total == 0:
            break
        cum = np.concatenate(([0], np.cumsum(counts)))
        flat = np.arange(total) - np.repeat(cum[:-1], counts) + np.repeat(starts, counts)
        nbrs = indices[flat]
        if skip_edge is not None:
            a, b = skip_edge
            srcs = np.repeat(frontier, counts)
            drop = ((srcs == a) & (nbrs == b)) | ((srcs == b) & (nbrs == a))
            if drop.any():
                nbrs = nbrs[~drop]
        fresh = np.unique(nbrs[levels[nbrs] < 0])
        if fresh.size == 0:
            break
        depth += 1
        levels[fresh] = depth
        frontier = fresh
    return levels


def _bfs_levels_small(graph: Graph, source: int, max_depth: Optional[int],
                      skip_edge: Optional[tuple[int, int]]) -> np.ndarray:
    # scalar loop beats array machinery below a few hundred nodes
    indptr = graph.indptr.tolist()
    indices = graph.indices.tolist()
    levels = [-1] * graph.num_nodes
    levels[source] = 0
    frontier = [source]
    depth = 0
    skip_a, skip_b = skip_edge if skip_edge is not None else (-1, -1)
    while frontier and (max_depth is None or depth < max_depth):
        depth += 1
        nxt = []
        for node in frontier:
            for j in range(indptr[node], indptr[node + 1]):
                nbr = indices[j]
                if levels[nbr] >= 0:
                    continue
                if (node == skip_a and nbr == skip_b) or (node == skip_b and nbr == skip_a):
                    continue
                levels[nbr] = depth
                nxt.append(nbr)
        frontier = nxt
    return np.asarray(levels, dtype=np.int64)


def bounded_bfs(graph: Graph, source: int,
                max_depth: Optional[int] = None) -> dict[int, int]:
    """Exact shortest-path hop counts from ``source``.

    Returns a node -> depth map for every node within ``max_depth`` hops;
    absent keys are farther than ``max_depth`` or unreachable. ``None``
    means unlimited depth.
    """
    if not 0 <= source < graph.num_nodes:
        raise ValueError(f"source {source} out of range [0, {graph.num_nodes})")
    if max_depth is not None and max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    levels = _bfs_levels(graph, source, max_depth)
    reached = np.nonzero(levels >= 0)[0]
    return {int(i): int(levels[i]) for i in reached}


def load_edge_list(source) -> Graph:
    """Parse a whitespace-separated edge list into a :class:`Graph`.

    ``source`` is a path or a text stream. Node tokens may be arbitrary
    strings; they are re-indexed to ``0..n-1`` in first-appearance order.
    Lines starting with ``#`` or ``%`` are comments. Duplicate lines and
    reversed duplicates collapse to one edge; self-loops are dropped with
    a logged count.
    """
    if hasattr(source, "read"):
        return _parse_edge_lines(source)
    with open(source, "r", encoding="utf-8") as fh:
        return _parse_edge_lines(fh)


def _parse_edge_lines(stream: IO[str]) -> Graph:
    ids: dict[str, int] = {}
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line[0] in "#%":
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise ValueError(f"line {lineno}: expected two node tokens, got {len(tokens)}")
        pair = []
        for tok in tokens:
            if tok not in ids:
                ids[tok] = len(ids)
            pair.append(ids[tok])
        edges.append((pair[0], pair[1]))
    if not ids:
        raise ValueError("empty edge list")
    g = Graph.from_edges(len(ids), edges)
    if g.dropped_self_loops:
        logger.warning("dropped %d self-loop(s) while loading edge list",
                       g.dropped_self_loops)
    return g


def write_edge_list(graph: Graph, target) -> None:
    """Write one ``u v`` line per edge, u < v, sorted."""
    if hasattr(target, "write"):
        for u, v in graph.edge_array.tolist():
            target.write(f"{u} {v}\n")
        return
    with open(target, "w", encoding="utf-8") as fh:
        write_edge_list(graph, fh)

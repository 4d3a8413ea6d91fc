"""Angle-hop enclosing subgraphs around a candidate link."""
from __future__ import annotations

from dataclasses import dataclass, replace
import numpy as np

from .graph import Graph, _bfs_levels


@dataclass(frozen=True)
class EnclosingSubgraph:
    """Node-induced subgraph around a target pair, with local id maps.

    The node set is { z : d(u,z) <= k or d(z,v) <= l } computed in the
    observed graph with the target edge absent; ``has_target_link``
    records whether the (u', v') edge was added back afterwards.
    """

    local_graph: Graph
    local_to_global: np.ndarray
    target_local: tuple[int, int]
    angle: tuple[int, int]
    has_target_link: bool

    @property
    def num_nodes(self) -> int:
        return self.local_graph.num_nodes


def extract_angle_hop(observed: Graph, u: int, v: int, k: int, l: int) -> EnclosingSubgraph:
    """Extract the (k, l)-angle-hop enclosing subgraph for the pair (u, v).

    Distances d(u, .) and d(., v) are taken in ``observed`` with the edge
    (u, v) removed if present, so a positive training link never leaks
    into its own features. The returned subgraph has
    ``has_target_link=False``.
    """
    n = observed.num_nodes
    if not (0 <= u < n and 0 <= v < n):
        raise ValueError(f"target ids ({u}, {v}) out of range [0, {n})")
    if u == v:
        raise ValueError("target nodes must differ")
    if k < 0 or l < 0 or max(k, l) < 1:
        raise ValueError(f"invalid angle ({k}, {l}): need k >= 1 or l >= 1")

    skip = (u, v) if observed.has_edge(u, v) else None
    dist_u = _bfs_levels(observed, u, max_depth=k, skip_edge=skip)
    dist_v = _bfs_levels(observed, v, max_depth=l, skip_edge=skip)
    members = ((dist_u >= 0) & (dist_u <= k)) | ((dist_v >= 0) & (dist_v <= l))
    local_to_global = np.nonzero(members)[0].astype(np.int64)

    # induced edges, minus the target edge
    local_of = np.full(n, -1, dtype=np.int64)
    local_of[local_to_global] = np.arange(local_to_global.size)
    starts = observed.indptr[local_to_global]
    counts = observed.indptr[local_to_global + 1] - starts
    total = int(counts.sum())
    if total:
        cum = np.concatenate(([0], np.cumsum(counts)))
        flat = np.arange(total) - np.repeat(cum[:-1], counts) + np.repeat(starts, counts)
        dst = observed.indices[flat]
        src = np.repeat(local_to_global, counts)
        keep = (local_of[dst] >= 0) & (src < dst)
        keep &= ~(((src == u) & (dst == v)) | ((src == v) & (dst == u)))
        edges = np.stack([local_of[src[keep]], local_of[dst[keep]]], axis=1)
        lo = np.minimum(edges[:, 0], edges[:, 1])
        hi = np.maximum(edges[:, 0], edges[:, 1])
        order = np.lexsort((hi, lo))
        edges = np.stack([lo[order], hi[order]], axis=1)
    else:
        edges = np.empty((0, 2), dtype=np.int64)

    local = Graph._from_canonical(local_to_global.size, edges)
    target_local = (int(local_of[u]), int(local_of[v]))
    return EnclosingSubgraph(local, local_to_global, target_local, (k, l), False)


def add_target_link(sub: EnclosingSubgraph) -> EnclosingSubgraph:
    """Copy of ``sub`` with the target edge connected; node set unchanged."""
    if sub.has_target_link:
        raise ValueError("target link already present")
    a, b = sub.target_local
    lo, hi = (a, b) if a < b else (b, a)
    edges = np.concatenate([sub.local_graph.edge_array, [[lo, hi]]])
    order = np.lexsort((edges[:, 1], edges[:, 0]))
    local = Graph._from_canonical(sub.num_nodes, edges[order])
    return replace(sub, local_graph=local, has_target_link=True)


def angle_menu(max_hop: int) -> list[tuple[int, int]]:
    """All angle types {(k, l) : 0 <= l <= k <= max_hop, k > 0}, sorted."""
    if max_hop < 1:
        raise ValueError("max_hop must be >= 1")
    return [(k, l) for k in range(1, max_hop + 1) for l in range(0, k + 1)]

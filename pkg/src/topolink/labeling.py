"""Distance-based node labels and the edge-weight function they induce."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import _bfs_levels
from .subgraphs import EnclosingSubgraph


@dataclass(frozen=True)
class NodeLabeling:
    """Per-local-node positive labels relative to two center nodes."""

    labels: np.ndarray
    scheme: str
    centers: tuple[int, int]


@dataclass(frozen=True)
class EdgeWeights:
    """Per-local-edge weights, aligned with the subgraph's sorted edge list."""

    weights: np.ndarray


def drnl(sub: EnclosingSubgraph, a: int, b: int) -> NodeLabeling:
    """Double-radius node labeling of the subgraph based on centers (a, b).

    For a node w at distances (da, db) from the centers *inside the
    subgraph as given*, the label is 1 + min(da, db) + q(q + r - 1) with
    da + db = 2q + r, r in {0, 1}. Centers get label 1 by convention.
    Nodes missing either distance get the sentinel L_max + 1, which
    places their edges after every reachable edge in the filtration.
    """
    n = sub.num_nodes
    if a == b:
        raise ValueError("center nodes must differ")
    if not (0 <= a < n and 0 <= b < n):
        raise ValueError(f"center ids ({a}, {b}) out of range [0, {n})")
    da = _bfs_levels(sub.local_graph, a)
    db = _bfs_levels(sub.local_graph, b)
    unreachable = (da < 0) | (db < 0)
    s = da + db
    q, r = s // 2, s % 2
    labels = (1 + np.minimum(da, db) + q * (q + r - 1)).astype(np.float64)
    labels[a] = 1.0
    labels[b] = 1.0
    unreachable[a] = unreachable[b] = False
    l_max = labels[~unreachable].max()
    labels[unreachable] = l_max + 1.0
    return NodeLabeling(labels, "drnl", (a, b))


def degree_drnl(sub: EnclosingSubgraph, a: int, b: int) -> NodeLabeling:
    """DRNL plus the fractional correction (M - deg(w)) / M.

    M is the maximum degree within the subgraph (target edge counted iff
    present), so hubs keep smaller labels and their edges enter the
    filtration earlier. With no edges the correction is zero and the
    labels reduce to plain DRNL.
    """
    base = drnl(sub, a, b)
    deg = sub.local_graph.degree
    m = int(deg.max())
    if m == 0:
        labels = base.labels.copy()
    else:
        labels = base.labels + (m - deg) / m
    return NodeLabeling(labels, "degree_drnl", (a, b))


def edge_weights(sub: EnclosingSubgraph, labeling: NodeLabeling) -> EdgeWeights:
    """Edge weights W(w, z) = max(f(w), f(z)) + min(f(w), f(z)) / max(...).

    The fractional term separates edges whose endpoint maxima coincide,
    cutting down weight ties in the filtration.
    """
    labels = labeling.labels
    if labels.shape[0] != sub.num_nodes:
        raise ValueError("labeling does not cover the subgraph")
    if np.any(labels <= 0):
        raise ValueError("labels must be positive")
    e = sub.local_graph.edge_array
    fw = labels[e[:, 0]]
    fz = labels[e[:, 1]]
    hi = np.maximum(fw, fz)
    lo = np.minimum(fw, fz)
    return EdgeWeights(hi + lo / hi)

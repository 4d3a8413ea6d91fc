"""Flag filtrations and persistence diagrams in dimensions 0 and 1."""
from __future__ import annotations

import csv
from dataclasses import dataclass
import numpy as np

from .labeling import EdgeWeights
from .subgraphs import EnclosingSubgraph


@dataclass(frozen=True)
class Filtration:
    """Simplices (vertex tuple, dimension, value) sorted by (value, dim, verts).

    Vertices carry value 0, edges their weight, and a triangle the max of
    its three edge values, so faces never enter after cofaces.
    """

    simplices: tuple[tuple[tuple[int, ...], int, float], ...]
    max_dim: int


@dataclass(frozen=True)
class PersistenceDiagram:
    """Multiset of (birth, death, dim) persistence pairs.

    ``essential`` flags classes that never die in the filtration; their
    death is capped at ``cap`` (the subgraph's largest filtration value)
    so downstream vectorization sees finite coordinates.
    """

    births: np.ndarray
    deaths: np.ndarray
    dims: np.ndarray
    essential: np.ndarray
    cap: float

    @property
    def num_pairs(self) -> int:
        return self.births.shape[0]

    def in_dim(self, dim: int) -> "PersistenceDiagram":
        sel = self.dims == dim
        return PersistenceDiagram(self.births[sel], self.deaths[sel],
                                  self.dims[sel], self.essential[sel], self.cap)

    def persistence(self) -> np.ndarray:
        return self.deaths - self.births


def _make_diagram(rows: list[tuple[float, float, int, bool]], cap: float) -> PersistenceDiagram:
    if rows:
        births = np.array([r[0] for r in rows], dtype=np.float64)
        deaths = np.array([r[1] for r in rows], dtype=np.float64)
        dims = np.array([r[2] for r in rows], dtype=np.uint8)
        ess = np.array([r[3] for r in rows], dtype=bool)
    else:
        births = np.empty(0)
        deaths = np.empty(0)
        dims = np.empty(0, dtype=np.uint8)
        ess = np.empty(0, dtype=bool)
    return PersistenceDiagram(births, deaths, dims, ess, cap)


def build_flag_filtration(sub: EnclosingSubgraph, weights: EdgeWeights,
                          max_dim: int) -> Filtration:
    """Flag (clique) filtration of the weighted subgraph, truncated at max_dim.

    max_dim=1 stops at edges; max_dim=2 adds every 3-clique at the max of
    its edge values, which is all one-dimensional homology needs.
    """
    if max_dim not in (1, 2):
        raise ValueError("max_dim must be 1 or 2")
    g = sub.local_graph
    w = np.asarray(weights.weights, dtype=np.float64)
    if w.shape[0] != g.num_edges:
        raise ValueError("weights do not match the subgraph edge list")
    simplices: list[tuple[tuple[int, ...], int, float]] = [
        ((v,), 0, 0.0) for v in range(g.num_nodes)
    ]
    edge_value: dict[tuple[int, int], float] = {}
    for (a, b), val in zip(g.edge_array.tolist(), w.tolist()):
        simplices.append(((a, b), 1, val))
        edge_value[(a, b)] = val
    if max_dim == 2:
        for a, b in g.edge_array.tolist():
            common = np.intersect1d(g.neighbors(a), g.neighbors(b),
                                    assume_unique=True)
            for c in common[common > b].tolist():
                val = max(edge_value[(a, b)], edge_value[(a, c)], edge_value[(b, c)])
                simplices.append(((a, b, c), 2, val))
    simplices.sort(key=lambda s: (s[2], s[1], s[0]))
    return Filtration(tuple(simplices), max_dim)


def persistence_dim0(sub: EnclosingSubgraph, weights: EdgeWeights) -> PersistenceDiagram:
    """Zero-dimensional diagram via a union-find sweep over sorted edges.

    Every component is born at 0; each merge emits (0, W(edge)); the
    survivors become essential pairs at the cap value. Agrees with the
    matrix-reduction output (cross-checked in the test suite).
    """
    g = sub.local_graph
    w = np.asarray(weights.weights, dtype=np.float64)
    cap = float(w.max()) if w.size else 0.0
    order = np.lexsort((g.edge_array[:, 1], g.edge_array[:, 0], w))
    heads = g.edge_array[order, 0].tolist()
    tails = g.edge_array[order, 1].tolist()
    values = w[order].tolist()
    parent = list(range(g.num_nodes))

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    deaths: list[float] = []
    for a, b, value in zip(heads, tails, values):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
            deaths.append(value)
    rows: list[tuple[float, float, int, bool]] = [
        (0.0, d, 0, False) for d in deaths
    ]
    n_components = g.num_nodes - len(rows)
    rows.extend((0.0, cap, 0, True) for _ in range(n_components))
    return _make_diagram(rows, cap)


def _validate_filtration(f: Filtration) -> None:
    value_of: dict[tuple[int, ...], float] = {}
    prev_key = None
    for verts, dim, val in f.simplices:
        if len(verts) != dim + 1 or list(verts) != sorted(verts):
            raise ValueError(f"malformed simplex {verts}")
        key = (val, dim, verts)
        if prev_key is not None and key < prev_key:
            raise ValueError("filtration is not sorted by (value, dim, vertices)")
        prev_key = key
        for facet in _facets(verts):
            if facet not in value_of:
                raise ValueError(f"face {facet} of {verts} missing")
            if value_of[facet] > val:
                raise ValueError(
                    f"non-monotone filtration: face {facet} enters after {verts}")
        value_of[verts] = val


def _facets(verts: tuple[int, ...]) -> list[tuple[int, ...]]:
    if len(verts) == 1:
        return []
    return [verts[:i] + verts[i + 1:] for i in range(len(verts))]


def persistence_reduce(f: Filtration) -> PersistenceDiagram:
    """Persistence pairs by boundary-matrix reduction over GF(2).

    Columns are reduced one dimension at a time, from the top dimension
    down (column additions never cross dimensions), with the clearing
    shortcut: pivot rows found while reducing dimension p are known zero
    columns of dimension p-1 and are skipped there. Emits pairs for every
    dimension below ``max_dim``; zero-persistence pairs are kept.
    """
    _validate_filtration(f)
    by_dim: list[list[tuple[tuple[int, ...], float]]] = [[] for _ in range(f.max_dim + 1)]
    for verts, dim, val in f.simplices:
        by_dim[dim].append((verts, val))
    position = [{verts: i for i, (verts, _) in enumerate(group)} for group in by_dim]
    cap = f.simplices[-1][2] if f.simplices else 0.0

    rows: list[tuple[float, float, int, bool]] = []
    cleared: set[int] = set()
    for dim in range(f.max_dim, 0, -1):
        face_pos = position[dim - 1]
        reduced: dict[int, int] = {}  # pivot row -> reduced column bitmask
        killed: set[int] = set()
        for j, (verts, val) in enumerate(by_dim[dim]):
            if j in cleared:
                continue  # paired already as the birth of a (dim, dim+1) pair
            col = 0
            for facet in _facets(verts):
                col |= 1 << face_pos[facet]
            while col:
                low = col.bit_length() - 1
                if low not in reduced:
                    break
                col ^= reduced[low]
            if col:
                low = col.bit_length() - 1
                reduced[low] = col
                killed.add(low)
                rows.append((by_dim[dim - 1][low][1], val, dim - 1, False))
            elif dim < f.max_dim:
                # a creator not cleared by the pass above never dies
                rows.append((val, cap, dim, True))
        cleared = killed
    for i, (_, val) in enumerate(by_dim[0]):
        if i not in cleared:
            rows.append((val, cap, 0, True))
    rows.sort(key=lambda r: (r[2], r[0], r[1]))
    return _make_diagram(rows, cap)


def write_diagram_csv(diagram: PersistenceDiagram, target) -> None:
    """Debug dump: one ``birth,death,dim,essential`` row per pair."""
    if hasattr(target, "write"):
        writer = csv.writer(target)
        writer.writerow(["birth", "death", "dim", "essential"])
        for i in range(diagram.num_pairs):
            writer.writerow([repr(float(diagram.births[i])),
                             repr(float(diagram.deaths[i])),
                             int(diagram.dims[i]), int(diagram.essential[i])])
        return
    with open(target, "w", newline="", encoding="utf-8") as fh:
        write_diagram_csv(diagram, fh)

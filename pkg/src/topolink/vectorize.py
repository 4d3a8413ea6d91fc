"""Persistence images and the per-link feature vector."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import ndtr

from .graph import Graph
from .labeling import degree_drnl, drnl, edge_weights
from .persistence import (PersistenceDiagram, build_flag_filtration,
                          persistence_dim0, persistence_reduce)
from .subgraphs import EnclosingSubgraph, add_target_link, extract_angle_hop

logger = logging.getLogger(__name__)

WEIGHT_SCHEMES = ("log1p", "reciprocal_log")
LABEL_SCHEMES = ("drnl", "degree_drnl")
CENTER_POLICIES = ("target", "random")


@dataclass(frozen=True)
class PIGrid:
    """Axis ranges and bandwidth for one homology dimension's image."""

    birth_range: tuple[float, float]
    pers_range: tuple[float, float]
    sigma: float

    def __post_init__(self):
        if self.birth_range[1] <= self.birth_range[0]:
            raise ValueError("birth range must have positive width")
        if self.pers_range[1] <= self.pers_range[0]:
            raise ValueError("persistence range must have positive width")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class PIConfig:
    """Grid layout shared by every persistence image of one experiment."""

    resolution: int
    grids: tuple[PIGrid, ...]
    weight: str = "log1p"

    def __post_init__(self):
        if self.resolution < 1:
            raise ValueError("resolution must be >= 1")
        if self.weight not in WEIGHT_SCHEMES:
            raise ValueError(f"unknown weight scheme {self.weight!r}")

    @property
    def max_dim(self) -> int:
        return len(self.grids) - 1

    @classmethod
    def from_extrema(cls, resolution: int, max_births: Sequence[float],
                     max_pers: Sequence[float], weight: str = "log1p") -> "PIConfig":
        """Build grids [0, 1.05*max] per axis; degenerate axes become [0, 1]."""
        grids = []
        for mb, mp in zip(max_births, max_pers):
            b1 = 1.05 * mb if mb > 0 else 1.0
            p1 = 1.05 * mp if mp > 0 else 1.0
            grids.append(PIGrid((0.0, b1), (0.0, p1), sigma=b1 / resolution))
        return cls(resolution, tuple(grids), weight)


def fit_pi_grid(diagrams: Iterable[PersistenceDiagram], resolution: int,
                max_dim: int, weight: str = "log1p") -> PIConfig:
    """Fit per-dimension image grids to a training diagram collection.

    Upper bounds are the maxima of (birth, persistence) seen in training,
    padded by 5%; the bandwidth is one birth-axis cell width. An empty
    collection falls back to unit ranges with a warning.
    """
    max_births = [0.0] * (max_dim + 1)
    max_pers = [0.0] * (max_dim + 1)
    seen = False
    for dgm in diagrams:
        seen = True
        for dim in range(max_dim + 1):
            part = dgm.in_dim(dim)
            if part.num_pairs:
                max_births[dim] = max(max_births[dim], float(part.births.max()))
                max_pers[dim] = max(max_pers[dim], float(part.persistence().max()))
    if not seen:
        logger.warning("fit_pi_grid: empty diagram collection, using unit grids")
    return PIConfig.from_extrema(resolution, max_births, max_pers, weight)


def _point_weights(pers: np.ndarray, scheme: str) -> np.ndarray:
    if scheme == "log1p":
        return np.log1p(pers)
    if scheme == "reciprocal_log":
        return 1.0 / np.log1p(pers)
    raise ValueError(f"unknown weight scheme {scheme!r}")


def persistence_image(diagram: PersistenceDiagram, dim: int,
                      cfg: PIConfig) -> np.ndarray:
    """Integrate the weighted Gaussian persistence surface over the grid.

    Each point (birth, death) maps to (birth, persistence); its mass over
    a cell is the exact product of two normal-CDF differences times the
    point weight. Zero-persistence points contribute nothing; points
    outside the grid still contribute whatever mass falls inside.
    """
    n = cfg.resolution
    grid = cfg.grids[dim]
    part = diagram.in_dim(dim)
    pers = part.persistence()
    keep = pers > 0
    if not keep.any():
        return np.zeros(n * n)
    births = part.births[keep]
    pers = pers[keep]
    w = _point_weights(pers, cfg.weight)
    bx = np.linspace(grid.birth_range[0], grid.birth_range[1], n + 1)
    py = np.linspace(grid.pers_range[0], grid.pers_range[1], n + 1)
    bcdf = ndtr((bx[None, :] - births[:, None]) / grid.sigma)
    pcdf = ndtr((py[None, :] - pers[:, None]) / grid.sigma)
    image = np.einsum("i,ij,ik->jk", w, np.diff(bcdf, axis=1), np.diff(pcdf, axis=1))
    return image.reshape(n * n)


def subgraph_diagram(sub: EnclosingSubgraph, weights, max_dim: int) -> PersistenceDiagram:
    """Diagram of one labeled subgraph: union-find for H0 only, reduction above."""
    if max_dim == 0:
        return persistence_dim0(sub, weights)
    return persistence_reduce(build_flag_filtration(sub, weights, max_dim=2))


def _labeled_weights(sub: EnclosingSubgraph, centers: tuple[int, int], scheme: str):
    if scheme == "degree_drnl":
        labeling = degree_drnl(sub, *centers)
    elif scheme == "drnl":
        labeling = drnl(sub, *centers)
    else:
        raise ValueError(f"unknown labeling scheme {scheme!r}")
    return edge_weights(sub, labeling)


def _choose_centers(sub: EnclosingSubgraph, policy: str, seed: int,
                    u: int, v: int, k: int, l: int) -> tuple[int, int]:
    if policy == "target":
        return sub.target_local
    if policy != "random":
        raise ValueError(f"unknown center policy {policy!r}")
    # seed from the subgraph's canonical identity so (u,v) and (v,u)
    # draws coincide: the (k,l) subgraph of (u,v) is the (l,k) one of (v,u)
    cu, cv, ck, cl = (u, v, k, l) if u < v else (v, u, l, k)
    rng = np.random.default_rng([seed, cu, cv, ck, cl])
    a, b = rng.choice(sub.num_nodes, size=2, replace=False)
    return int(a), int(b)


def subgraph_diagram_pair(observed: Graph, u: int, v: int, k: int, l: int,
                          scheme: str, center_policy: str, max_dim: int,
                          seed: int) -> tuple[PersistenceDiagram, PersistenceDiagram]:
    """(without-link, with-link) diagrams for one oriented angle extraction.

    Centers are chosen once per node set and shared by both variants;
    labels, weights, and diagrams are recomputed from scratch after the
    target edge is connected.
    """
    sub = extract_angle_hop(observed, u, v, k, l)
    centers = _choose_centers(sub, center_policy, seed, u, v, k, l)
    dgm_minus = subgraph_diagram(sub, _labeled_weights(sub, centers, scheme), max_dim)
    sub_plus = add_target_link(sub)
    dgm_plus = subgraph_diagram(sub_plus, _labeled_weights(sub_plus, centers, scheme), max_dim)
    return dgm_minus, dgm_plus


def feature_length(max_dim: int, resolution: int) -> int:
    return 2 * (max_dim + 1) * resolution * resolution


def features_from_diagram_pairs(pairs: Sequence[tuple[PersistenceDiagram, PersistenceDiagram]],
                                cfg: PIConfig, max_dim: int) -> np.ndarray:
    """[x- | x+] vector averaged over the oriented extractions of one angle."""
    minus = np.zeros((max_dim + 1) * cfg.resolution ** 2)
    plus = np.zeros_like(minus)
    for dgm_minus, dgm_plus in pairs:
        minus += np.concatenate([persistence_image(dgm_minus, d, cfg)
                                 for d in range(max_dim + 1)])
        plus += np.concatenate([persistence_image(dgm_plus, d, cfg)
                                for d in range(max_dim + 1)])
    minus /= len(pairs)
    plus /= len(pairs)
    return np.concatenate([minus, plus])


def link_features(observed: Graph, u: int, v: int, angle: tuple[int, int],
                  cfg: PIConfig, scheme: str = "degree_drnl",
                  center_policy: str = "target", max_dim: int = 0,
                  seed: int = 0) -> np.ndarray:
    """Feature vector for one candidate link under one angle type.

    Runs extraction -> labeling -> weights -> diagrams -> images for the
    subgraph without the target link (x-) and with it (x+). For k != l
    the whole procedure repeats with the swapped angle and the two
    results are averaged, which makes the output symmetric in (u, v).
    Length is always 2 * (max_dim + 1) * resolution^2.
    """
    k, l = angle
    orientations = [(k, l)] if k == l else [(k, l), (l, k)]
    pairs = [subgraph_diagram_pair(observed, u, v, kk, ll, scheme,
                                   center_policy, max_dim, seed)
             for kk, ll in orientations]
    return features_from_diagram_pairs(pairs, cfg, max_dim)

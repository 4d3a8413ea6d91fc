"""Experiment driver: seeded runs, feature export, projection analysis."""
from __future__ import annotations

import csv
import logging
import multiprocessing
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .graph import Graph, load_edge_list
from .model import MultiAngleModel, TrainConfig, auc, train_multi_angle
from .persistence import PersistenceDiagram
from .splits import split_links
from .subgraphs import angle_menu
from .vectorize import (CENTER_POLICIES, LABEL_SCHEMES, WEIGHT_SCHEMES,
                        PIConfig,
                        feature_length, features_from_diagram_pairs,
                        subgraph_diagram_pair)

logger = logging.getLogger(__name__)

Pair = tuple[int, int]


@dataclass
class ExperimentConfig:
    """Everything a benchmark run depends on, defaults mirroring the protocol."""

    dataset: str
    ratios: tuple[float, float, float] = (0.85, 0.05, 0.10)
    seeds: tuple[int, ...] = tuple(range(10))
    max_hop: int = 3
    max_dim: int = 0
    labeling: str = "degree_drnl"
    centers: str = "target"
    resolution: int = 7
    pi_weight: str = "log1p"
    train: TrainConfig = field(default_factory=TrainConfig)
    out_dir: Optional[str] = None
    workers: int = 1

    def validate(self) -> None:
        if self.max_hop < 1:
            raise ValueError("max_hop must be >= 1")
        if self.max_dim not in (0, 1):
            raise ValueError("max_dim must be 0 or 1")
        if self.labeling not in LABEL_SCHEMES:
            raise ValueError(f"labeling must be one of {LABEL_SCHEMES}")
        if self.centers not in CENTER_POLICIES:
            raise ValueError(f"centers must be one of {CENTER_POLICIES}")
        if self.resolution < 1:
            raise ValueError("resolution must be >= 1")
        if self.pi_weight not in WEIGHT_SCHEMES:
            raise ValueError(f"pi_weight must be one of {WEIGHT_SCHEMES}")
        if len(self.ratios) != 3:
            raise ValueError("ratios must have three entries")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        self.train.validate()


# -- bundled diagram extraction ---------------------------------------
#
# One "unit" is a single (oriented angle, with/without link) diagram.
# Bundles pack every unit of one link into flat arrays so millions of
# small diagrams survive multiprocessing without object overhead.

@dataclass
class LinkDiagrams:
    births: np.ndarray
    deaths: np.ndarray
    dims: np.ndarray
    offsets: np.ndarray

    def unit(self, i: int) -> PersistenceDiagram:
        lo, hi = self.offsets[i], self.offsets[i + 1]
        births = self.births[lo:hi].astype(np.float64)
        deaths = self.deaths[lo:hi].astype(np.float64)
        return PersistenceDiagram(births, deaths, self.dims[lo:hi],
                                  np.zeros(hi - lo, dtype=bool), 0.0)


def _orientation_plan(angles: Sequence[Pair]) -> list[tuple[int, int, int]]:
    plan = []
    for i, (k, l) in enumerate(angles):
        plan.append((i, k, l))
        if k != l:
            plan.append((i, l, k))
    return plan


def _link_bundle(observed: Graph, u: int, v: int,
                 plan: Sequence[tuple[int, int, int]], scheme: str,
                 centers: str, max_dim: int, seed: int) -> LinkDiagrams:
    births, deaths, dims = [], [], []
    offsets = [0]
    total = 0
    for _, kk, ll in plan:
        for dgm in subgraph_diagram_pair(observed, u, v, kk, ll, scheme,
                                         centers, max_dim, seed):
            births.append(dgm.births)
            deaths.append(dgm.deaths)
            dims.append(dgm.dims)
            total += dgm.num_pairs
            offsets.append(total)
    return LinkDiagrams(
        np.concatenate(births).astype(np.float32),
        np.concatenate(deaths).astype(np.float32),
        np.concatenate(dims),
        np.asarray(offsets, dtype=np.int64),
    )


_POOL_STATE: dict = {}


def _init_pool(observed, plan, scheme, centers, max_dim, seed):
    _POOL_STATE.update(observed=observed, plan=plan, scheme=scheme,
                       centers=centers, max_dim=max_dim, seed=seed)


def _pool_bundle(link: Pair) -> LinkDiagrams:
    s = _POOL_STATE
    return _link_bundle(s["observed"], link[0], link[1], s["plan"], s["scheme"],
                        s["centers"], s["max_dim"], s["seed"])


def extract_bundles(observed: Graph, links: Sequence[Pair],
                    angles: Sequence[Pair], scheme: str, centers: str,
                    max_dim: int, seed: int, workers: int = 1) -> list[LinkDiagrams]:
    """Per-link diagram bundles, optionally fanned out over processes.

    Results are collected in link order, so worker count never changes
    the output.
    """
    plan = _orientation_plan(angles)
    if workers <= 1 or len(links) < 4 * workers:
        return [_link_bundle(observed, u, v, plan, scheme, centers, max_dim, seed)
                for u, v in links]
    chunk = max(8, len(links) // (workers * 16))
    with multiprocessing.Pool(
            workers, initializer=_init_pool,
            initargs=(observed, plan, scheme, centers, max_dim, seed)) as pool:
        return list(pool.map(_pool_bundle, links, chunksize=chunk))


def fit_grids_from_bundles(bundles: Sequence[LinkDiagrams], resolution: int,
                           max_dim: int, weight: str = "log1p") -> PIConfig:
    """Same policy as fit_pi_grid, streamed over packed bundles."""
    max_births = [0.0] * (max_dim + 1)
    max_pers = [0.0] * (max_dim + 1)
    for bundle in bundles:
        for dim in range(max_dim + 1):
            sel = bundle.dims == dim
            if sel.any():
                births = bundle.births[sel]
                pers = bundle.deaths[sel] - births
                max_births[dim] = max(max_births[dim], float(births.max()))
                max_pers[dim] = max(max_pers[dim], float(pers.max()))
    return PIConfig.from_extrema(resolution, max_births, max_pers, weight)


def features_from_bundles(bundles: Sequence[LinkDiagrams],
                          angles: Sequence[Pair], cfg: PIConfig,
                          max_dim: int) -> np.ndarray:
    """Stacked feature tensor (num_angles, num_links, feature_length)."""
    plan = _orientation_plan(angles)
    per_angle: list[list[int]] = [[] for _ in angles]
    for o, (angle_idx, _, _) in enumerate(plan):
        per_angle[angle_idx].append(o)
    n_links = len(bundles)
    feat = np.zeros((len(angles), n_links, feature_length(max_dim, cfg.resolution)),
                    dtype=np.float32)
    for j, bundle in enumerate(bundles):
        for i, orientations in enumerate(per_angle):
            pairs = [(bundle.unit(2 * o), bundle.unit(2 * o + 1))
                     for o in orientations]
            feat[i, j] = features_from_diagram_pairs(pairs, cfg, max_dim)
    return feat


# -- per-seed pipeline -------------------------------------------------

@dataclass
class SeedResult:
    seed: int
    status: str
    val_auc: float = float("nan")
    test_auc: float = float("nan")
    seconds: float = float("nan")
    reason: str = ""


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    results: list[SeedResult]

    def completed(self) -> list[SeedResult]:
        return [r for r in self.results if r.status == "ok"]

    @property
    def mean_test_auc(self) -> float:
        done = self.completed()
        return float(np.mean([r.test_auc for r in done])) if done else float("nan")

    @property
    def std_test_auc(self) -> float:
        done = self.completed()
        return float(np.std([r.test_auc for r in done])) if done else float("nan")


def run_seed(graph: Graph, cfg: ExperimentConfig, seed: int
             ) -> tuple[SeedResult, MultiAngleModel]:
    """Split, extract, fit grids on train diagrams, train, evaluate one seed."""
    t0 = time.perf_counter()
    angles = angle_menu(cfg.max_hop)
    split = split_links(graph, cfg.ratios, seed)
    parts = [split.links(p) for p in ("train", "val", "test")]
    links = [pair for pairs, _ in parts for pair in pairs]
    labels = [y for _, ys in parts for y in ys]
    n_train = len(parts[0][0])
    n_val = len(parts[1][0])

    bundles = extract_bundles(split.observed_graph, links, angles, cfg.labeling,
                              cfg.centers, cfg.max_dim, seed, cfg.workers)
    pi_cfg = fit_grids_from_bundles(bundles[:n_train], cfg.resolution,
                                   cfg.max_dim, cfg.pi_weight)
    feats = features_from_bundles(bundles, angles, pi_cfg, cfg.max_dim)
    del bundles

    sl_train = slice(0, n_train)
    sl_val = slice(n_train, n_train + n_val)
    sl_test = slice(n_train + n_val, len(links))
    y = np.asarray(labels, dtype=np.float64)
    model = train_multi_angle(feats[:, sl_train], y[sl_train],
                              feats[:, sl_val], y[sl_val],
                              replace(cfg.train, seed=seed), angles=angles)
    model.pi_config = pi_cfg
    model.labeling_scheme = cfg.labeling
    model.center_policy = cfg.centers
    model.max_dim = cfg.max_dim
    model.center_seed = seed

    test_auc = auc(model.predict(feats[:, sl_test]), y[sl_test])
    result = SeedResult(seed, "ok", val_auc=model.best_val_auc,
                        test_auc=test_auc, seconds=time.perf_counter() - t0)
    return result, model


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Full protocol: every seed once, then aggregate mean and std AUC.

    A failing seed is recorded with its reason and excluded from the
    aggregate instead of aborting the whole run. With an output
    directory set, writes metrics.csv and summary.txt.
    """
    cfg.validate()
    graph = load_edge_list(cfg.dataset)
    results: list[SeedResult] = []
    for seed in cfg.seeds:
        try:
            result, _ = run_seed(graph, cfg, seed)
        except Exception as exc:  # noqa: BLE001 - a seed failure must not kill the run
            logger.exception("seed %d failed", seed)
            result = SeedResult(seed, "failed", reason=f"{type(exc).__name__}: {exc}")
        else:
            logger.info("seed %d: test AUC %.4f (%.1fs)", seed,
                        result.test_auc, result.seconds)
        results.append(result)
    report = ExperimentReport(cfg, results)
    if cfg.out_dir is not None:
        write_report(report, cfg.out_dir)
    return report


def write_report(report: ExperimentReport, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "metrics.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["seed", "status", "val_auc", "test_auc",
                         "test_auc_std", "reason"])
        for r in report.results:
            writer.writerow([r.seed, r.status, repr(r.val_auc),
                             repr(r.test_auc), "", r.reason])
        done = report.completed()
        vals = [r.val_auc for r in done]
        writer.writerow(["aggregate", f"{len(done)}/{len(report.results)} ok",
                         repr(float(np.mean(vals)) if done else float("nan")),
                         repr(report.mean_test_auc),
                         repr(report.std_test_auc), ""])
    cfg = report.config
    lines = [
        f"dataset: {cfg.dataset}",
        f"max_hop: {cfg.max_hop}  max_dim: {cfg.max_dim}  resolution: {cfg.resolution}",
        f"labeling: {cfg.labeling}  centers: {cfg.centers}",
        f"ratios: {cfg.ratios}  seeds: {list(cfg.seeds)}",
        "",
    ]
    for r in report.results:
        if r.status == "ok":
            lines.append(f"seed {r.seed}: val AUC {r.val_auc:.4f}  "
                         f"test AUC {r.test_auc:.4f}  ({r.seconds:.1f}s)")
        else:
            lines.append(f"seed {r.seed}: FAILED ({r.reason})")
    done = report.completed()
    lines.append("")
    if done:
        lines.append(f"test AUC over {len(done)} seed(s): "
                     f"{100 * report.mean_test_auc:.2f} +/- {100 * report.std_test_auc:.2f}")
    else:
        lines.append("no seed completed")
    (out / "summary.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


def score_links(model: MultiAngleModel, observed: Graph,
                links: Sequence[Pair], workers: int = 1) -> np.ndarray:
    """Link-existence probabilities for new candidate pairs.

    Recomputes the feature pipeline with the exact settings stored in the
    model artifact (angle menu, labeling, centers, image grids, feature
    statistics), so a saved and reloaded model scores identically.
    """
    if model.pi_config is None:
        raise ValueError("model carries no image grid; was it trained by run_seed?")
    bundles = extract_bundles(observed, links, model.angles,
                              model.labeling_scheme, model.center_policy,
                              model.max_dim, model.center_seed, workers)
    feats = features_from_bundles(bundles, model.angles, model.pi_config,
                                  model.max_dim)
    return model.predict(feats)


# -- feature export and projection analysis ---------------------------

def export_features(cfg: ExperimentConfig, out_path, seed: Optional[int] = None
                    ) -> Path:
    """Write every link's per-angle feature row for one seed's split.

    Header is ``u,v,label,angle_k,angle_l,f_0,...,f_{m-1}``; rows run
    split by split (train, val, test), each link contributing one row
    per angle type. This file is the hand-off consumed by external
    classifiers.
    """
    cfg.validate()
    if seed is None:
        seed = cfg.seeds[0]
    graph = load_edge_list(cfg.dataset)
    angles = angle_menu(cfg.max_hop)
    split = split_links(graph, cfg.ratios, seed)
    parts = [split.links(p) for p in ("train", "val", "test")]
    links = [pair for pairs, _ in parts for pair in pairs]
    labels = [y for _, ys in parts for y in ys]
    n_train = len(parts[0][0])

    bundles = extract_bundles(split.observed_graph, links, angles, cfg.labeling,
                              cfg.centers, cfg.max_dim, seed, cfg.workers)
    pi_cfg = fit_grids_from_bundles(bundles[:n_train], cfg.resolution,
                                   cfg.max_dim, cfg.pi_weight)
    feats = features_from_bundles(bundles, angles, pi_cfg, cfg.max_dim)

    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    n_feat = feats.shape[2]
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["u", "v", "label", "angle_k", "angle_l"]
                        + [f"f_{i}" for i in range(n_feat)])
        for j, ((u, v), y) in enumerate(zip(links, labels)):
            for i, (k, l) in enumerate(angles):
                writer.writerow([u, v, y, k, l]
                                + [repr(float(x)) for x in feats[i, j]])
    return out


def analyze_projection(features: np.ndarray, labels: Sequence[int]
                       ) -> list[tuple[float, float, int]]:
    """Project each link to (h(with-link), h(without-link), label).

    h averages the L1 norms of the per-angle image blocks; the without-
    link block is the first half of each feature row, the with-link
    block the second.
    """
    feats = np.asarray(features, dtype=np.float64)
    if feats.ndim != 3:
        raise ValueError("features must be stacked per angle: (N, B, F)")
    half = feats.shape[2] // 2
    h_without = np.abs(feats[:, :, :half]).sum(axis=2).mean(axis=0)
    h_with = np.abs(feats[:, :, half:]).sum(axis=2).mean(axis=0)
    return [(float(w), float(wo), int(y))
            for w, wo, y in zip(h_with, h_without, labels)]


def write_projection_csv(rows: Sequence[tuple[float, float, int]], out_path) -> Path:
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["h_with_link", "h_without_link", "label"])
        for h1, h2, y in rows:
            writer.writerow([repr(h1), repr(h2), y])
    return out


def projection_for_config(cfg: ExperimentConfig, seed: Optional[int] = None,
                          part: str = "test") -> list[tuple[float, float, int]]:
    """Convenience wrapper: recompute one split's features and project them."""
    cfg.validate()
    if seed is None:
        seed = cfg.seeds[0]
    graph = load_edge_list(cfg.dataset)
    angles = angle_menu(cfg.max_hop)
    split = split_links(graph, cfg.ratios, seed)
    parts = {p: split.links(p) for p in ("train", "val", "test")}
    train_links = parts["train"][0]
    train_bundles = extract_bundles(split.observed_graph, train_links, angles,
                                    cfg.labeling, cfg.centers, cfg.max_dim,
                                    seed, cfg.workers)
    pi_cfg = fit_grids_from_bundles(train_bundles, cfg.resolution,
                                   cfg.max_dim, cfg.pi_weight)
    if part == "train":
        bundles = train_bundles
    else:
        bundles = extract_bundles(split.observed_graph, parts[part][0], angles,
                                  cfg.labeling, cfg.centers, cfg.max_dim,
                                  seed, cfg.workers)
    feats = features_from_bundles(bundles, angles, pi_cfg, cfg.max_dim)
    return analyze_projection(feats, parts[part][1])

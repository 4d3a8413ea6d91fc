"""Train/validation/test link splits with matched negative sampling."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .graph import Graph

Pair = tuple[int, int]


@dataclass(frozen=True)
class LinkSplit:
    """A seeded partition of a graph's edges plus sampled non-edges.

    ``observed_graph`` contains exactly the training positives (on the
    full node set) and is the graph every downstream feature is computed
    on. Positive lists partition the edge set; negative lists are
    pairwise disjoint, disjoint from the edge set, and each matches its
    positive list in size.
    """

    observed_graph: Graph
    train_pos: tuple[Pair, ...]
    val_pos: tuple[Pair, ...]
    test_pos: tuple[Pair, ...]
    train_neg: tuple[Pair, ...]
    val_neg: tuple[Pair, ...]
    test_neg: tuple[Pair, ...]
    seed: int

    def links(self, part: str) -> tuple[list[Pair], list[int]]:
        """Pairs and 0/1 labels for one of train/val/test, positives first."""
        pos = getattr(self, f"{part}_pos")
        neg = getattr(self, f"{part}_neg")
        return list(pos) + list(neg), [1] * len(pos) + [0] * len(neg)


def _canonical(pairs: np.ndarray) -> list[Pair]:
    u = np.minimum(pairs[:, 0], pairs[:, 1])
    v = np.maximum(pairs[:, 0], pairs[:, 1])
    return list(zip(u.tolist(), v.tolist()))


def sample_negative_links(graph: Graph, count: int, seed: int,
                          exclude: Sequence[Pair] = ()) -> list[Pair]:
    """Sample ``count`` distinct non-edges uniformly at random.

    The result avoids graph edges, self-pairs, ``exclude``, and internal
    duplicates. Pairs are unordered and returned as (u, v) with u < v.
    """
    rng = np.random.default_rng(seed)
    return _sample_negatives(graph, count, rng, exclude)


def _sample_negatives(graph: Graph, count: int, rng: np.random.Generator,
                      exclude: Sequence[Pair] = ()) -> list[Pair]:
    n = graph.num_nodes
    total_pairs = n * (n - 1) // 2
    excl_keys = {min(a, b) * n + max(a, b) for a, b in exclude}
    available = total_pairs - graph.num_edges - len(excl_keys)
    if count > available:
        raise ValueError(
            f"cannot sample {count} negatives: only {available} non-edges available")
    taken: set[int] = set()
    out: list[Pair] = []
    edge_keys = graph.edge_keys
    if available < 2 * count:
        # dense regime: enumerate the remaining non-edges and choose
        candidates = [
            (u, v)
            for u in range(n) for v in range(u + 1, n)
            if (key := u * n + v) not in edge_keys and key not in excl_keys
        ]
        picks = rng.choice(len(candidates), size=count, replace=False)
        return [candidates[i] for i in sorted(picks.tolist())]
    while len(out) < count:
        block = rng.integers(0, n, size=(max(64, count), 2))
        for a, b in block.tolist():
            if a == b:
                continue
            u, v = (a, b) if a < b else (b, a)
            key = u * n + v
            if key in edge_keys or key in excl_keys or key in taken:
                continue
            taken.add(key)
            out.append((u, v))
            if len(out) == count:
                break
    return out


def split_links(graph: Graph, ratios: tuple[float, float, float],
                seed: int) -> LinkSplit:
    """Shuffle edges by a seeded PRNG and cut them into train/val/test.

    Validation and test get floor(ratio * |E|) edges each; the remainder
    goes to train. Negatives are sampled per split with a shared
    exclusion set so no pair ever repeats across splits.
    """
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise ValueError("ratios must be three positive numbers")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {sum(ratios)}")
    m = graph.num_edges
    n_val = int(np.floor(ratios[1] * m))
    n_test = int(np.floor(ratios[2] * m))
    n_train = m - n_val - n_test
    if min(n_train, n_val, n_test) < 1:
        raise ValueError(
            f"{m} edges cannot give every split at least one edge "
            f"(train={n_train}, val={n_val}, test={n_test})")

    rng = np.random.default_rng(seed)
    perm = rng.permutation(m)
    shuffled = graph.edge_array[perm]
    val_pos = _canonical(shuffled[:n_val])
    test_pos = _canonical(shuffled[n_val:n_val + n_test])
    train_pos = _canonical(shuffled[n_val + n_test:])

    train_neg = _sample_negatives(graph, n_train, rng)
    val_neg = _sample_negatives(graph, n_val, rng, exclude=train_neg)
    test_neg = _sample_negatives(graph, n_test, rng, exclude=train_neg + val_neg)

    observed = Graph.from_edges(graph.num_nodes, train_pos)
    return LinkSplit(observed, tuple(train_pos), tuple(val_pos), tuple(test_pos),
                     tuple(train_neg), tuple(val_neg), tuple(test_neg), seed)


def save_split(split: LinkSplit, out_dir) -> None:
    """Persist a split as train/val/test CSVs (header ``u,v,label``) plus meta."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for part in ("train", "val", "test"):
        pairs, labels = split.links(part)
        with open(out / f"{part}.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["u", "v", "label"])
            for (u, v), y in zip(pairs, labels):
                writer.writerow([u, v, y])
    meta = {"num_nodes": split.observed_graph.num_nodes, "seed": split.seed}
    (out / "meta.json").write_text(json.dumps(meta), encoding="utf-8")


def load_split(in_dir) -> LinkSplit:
    """Reload a split written by :func:`save_split` for exact reproduction."""
    src = Path(in_dir)
    meta = json.loads((src / "meta.json").read_text(encoding="utf-8"))
    parts: dict[str, tuple[list[Pair], list[Pair]]] = {}
    for part in ("train", "val", "test"):
        pos: list[Pair] = []
        neg: list[Pair] = []
        with open(src / f"{part}.csv", newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                pair = (int(row["u"]), int(row["v"]))
                (pos if int(row["label"]) == 1 else neg).append(pair)
        parts[part] = (pos, neg)
    observed = Graph.from_edges(meta["num_nodes"], parts["train"][0])
    return LinkSplit(observed,
                     tuple(parts["train"][0]), tuple(parts["val"][0]),
                     tuple(parts["test"][0]), tuple(parts["train"][1]),
                     tuple(parts["val"][1]), tuple(parts["test"][1]),
                     int(meta["seed"]))

import numpy as np
import pytest

from topolink import (Graph, load_split, sample_negative_links, save_split,
                      split_links)


def _random_graph(rng, n, m):
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    picks = rng.choice(len(pairs), size=m, replace=False)
    return Graph.from_edges(n, [pairs[i] for i in picks])


def test_split_counts_floor_rule():
    rng = np.random.default_rng(0)
    g = _random_graph(rng, 332, 2126)
    split = split_links(g, (0.85, 0.05, 0.10), seed=1)
    assert len(split.val_pos) == 106
    assert len(split.test_pos) == 212
    assert len(split.train_pos) == 1808


def test_split_determinism():
    g = _random_graph(np.random.default_rng(1), 40, 120)
    a = split_links(g, (0.85, 0.05, 0.10), seed=5)
    b = split_links(g, (0.85, 0.05, 0.10), seed=5)
    assert a == b
    c = split_links(g, (0.85, 0.05, 0.10), seed=6)
    assert a != c


def test_split_rejects_degenerate_ratios():
    g = _random_graph(np.random.default_rng(2), 20, 40)
    with pytest.raises(ValueError):
        split_links(g, (1.0, 0.0, 0.0), seed=0)
    with pytest.raises(ValueError):
        split_links(g, (0.5, 0.3, 0.3), seed=0)


def test_split_too_small_graph():
    g = Graph.from_edges(4, [(0, 1), (1, 2)])
    with pytest.raises(ValueError, match="at least one edge"):
        split_links(g, (0.85, 0.05, 0.10), seed=0)


def test_split_partitions_edges():
    g = _random_graph(np.random.default_rng(3), 50, 200)
    split = split_links(g, (0.85, 0.05, 0.10), seed=9)
    combined = list(split.train_pos) + list(split.val_pos) + list(split.test_pos)
    assert sorted(combined) == sorted(g.edges())
    assert split.observed_graph.edges() == sorted(split.train_pos)
    assert split.observed_graph.num_nodes == g.num_nodes


def test_split_negative_contracts():
    g = _random_graph(np.random.default_rng(4), 50, 200)
    split = split_links(g, (0.85, 0.05, 0.10), seed=3)
    edge_set = set(g.edges())
    negs = [split.train_neg, split.val_neg, split.test_neg]
    poss = [split.train_pos, split.val_pos, split.test_pos]
    for neg, pos in zip(negs, poss):
        assert len(neg) == len(pos)
        for u, v in neg:
            assert u < v and (u, v) not in edge_set
    flat = [p for neg in negs for p in neg]
    assert len(flat) == len(set(flat))


def test_sample_negatives_complete_graph_errors():
    g = Graph.from_edges(4, [(u, v) for u in range(4) for v in range(u + 1, 4)])
    with pytest.raises(ValueError):
        sample_negative_links(g, 1, seed=0)


def test_sample_negatives_unique_nonedge():
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    assert sample_negative_links(g, 1, seed=0) == [(0, 2)]


def test_sample_negatives_avoid_edges_and_exclusions():
    g = _random_graph(np.random.default_rng(5), 30, 100)
    first = sample_negative_links(g, 40, seed=7)
    second = sample_negative_links(g, 40, seed=8, exclude=first)
    edge_set = set(g.edges())
    assert not (set(first) & edge_set)
    assert not (set(second) & edge_set)
    assert not (set(first) & set(second))
    assert len(set(first)) == 40 and len(set(second)) == 40


def test_save_load_round_trip(tmp_path):
    g = _random_graph(np.random.default_rng(6), 30, 90)
    split = split_links(g, (0.85, 0.05, 0.10), seed=11)
    save_split(split, tmp_path / "split")
    reloaded = load_split(tmp_path / "split")
    assert reloaded == split

import logging

import numpy as np
import pytest

from topolink import (Graph, PIConfig, PIGrid, degree_drnl, drnl, edge_weights,
                      feature_length, fit_pi_grid, link_features,
                      persistence_dim0, persistence_image)
from topolink.persistence import PersistenceDiagram

from oracles import make_subgraph, oracle_pi_cell


def _diagram(points, dims=None, cap=0.0):
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    dims = np.zeros(len(pts), dtype=np.uint8) if dims is None else np.asarray(dims, dtype=np.uint8)
    return PersistenceDiagram(pts[:, 0], pts[:, 1], dims,
                              np.zeros(len(pts), dtype=bool), cap)


def test_fit_empty_collection_defaults(caplog):
    with caplog.at_level(logging.WARNING):
        cfg = fit_pi_grid([], resolution=5, max_dim=0)
    assert "empty" in caplog.text
    grid = cfg.grids[0]
    assert grid.birth_range == (0.0, 1.0)
    assert grid.pers_range == (0.0, 1.0)
    assert grid.sigma == pytest.approx(1 / 5)


def test_fit_padding_rule():
    cfg = fit_pi_grid([_diagram([(0.0, 2.0)])], resolution=7, max_dim=0)
    assert cfg.grids[0].pers_range == (0.0, pytest.approx(2.1))
    # births are all zero, so the birth axis falls back to [0, 1]
    assert cfg.grids[0].birth_range == (0.0, 1.0)


def test_fit_bounds_cover_training_points():
    rng = np.random.default_rng(2)
    diagrams = []
    for _ in range(20):
        pts = np.stack([rng.uniform(0, 3, 5), rng.uniform(3, 8, 5)], axis=1)
        diagrams.append(_diagram(pts))
    cfg = fit_pi_grid(diagrams, resolution=4, max_dim=0)
    b1 = cfg.grids[0].birth_range[1]
    p1 = cfg.grids[0].pers_range[1]
    for dgm in diagrams:
        assert np.all(dgm.births <= b1)
        assert np.all(dgm.persistence() <= p1)


def test_image_empty_diagram_is_zero():
    cfg = PIConfig(6, (PIGrid((0, 1), (0, 1), 0.2),))
    out = persistence_image(_diagram(np.empty((0, 2))), 0, cfg)
    assert out.shape == (36,)
    assert np.all(out == 0)


def test_image_zero_persistence_contributes_nothing():
    cfg = PIConfig(5, (PIGrid((0, 1), (0, 1), 0.2),))
    assert np.all(persistence_image(_diagram([(0.5, 0.5)]), 0, cfg) == 0)


def test_image_total_mass_matches_weight():
    # grid spans +-4 sigma around the transformed point in both axes
    sigma = 0.25
    birth, death = 2.0, 3.0
    pers = death - birth
    cfg = PIConfig(8, (PIGrid((birth - 4 * sigma, birth + 4 * sigma),
                              (pers - 4 * sigma, pers + 4 * sigma), sigma),))
    vec = persistence_image(_diagram([(birth, death)]), 0, cfg)
    assert vec.sum() == pytest.approx(np.log1p(pers), rel=1e-3)


def test_image_linearity():
    cfg = PIConfig(6, (PIGrid((0, 3), (0, 4), 0.5),))
    d1 = _diagram([(0.5, 2.0), (1.0, 1.5)])
    d2 = _diagram([(0.0, 3.5)])
    joint = _diagram([(0.5, 2.0), (1.0, 1.5), (0.0, 3.5)])
    lhs = persistence_image(joint, 0, cfg)
    rhs = persistence_image(d1, 0, cfg) + persistence_image(d2, 0, cfg)
    assert np.allclose(lhs, rhs, atol=1e-15)


def test_image_cell_mass_against_quadrature_oracle():
    sigma = 0.3
    cfg = PIConfig(4, (PIGrid((0, 2), (0, 2), sigma),))
    birth, death = 0.7, 1.8
    pers = death - birth
    vec = persistence_image(_diagram([(birth, death)]), 0, cfg).reshape(4, 4)
    weight = np.log1p(pers)
    xe = np.linspace(0, 2, 5)
    ye = np.linspace(0, 2, 5)
    for i in range(4):
        for j in range(4):
            ref = oracle_pi_cell((birth, pers), weight,
                                 (xe[i], xe[i + 1], ye[j], ye[j + 1]), sigma)
            assert vec[i, j] == pytest.approx(ref, abs=1e-5)


def test_image_symmetric_cell_erf_identity():
    from math import erf, sqrt
    sigma = 0.4
    half = 0.3
    point, weight = (1.0, 1.0), 2.5
    mass = oracle_pi_cell(point, weight,
                          (1.0 - half, 1.0 + half, 1.0 - half, 1.0 + half), sigma)
    expected = weight * erf(half / (sigma * sqrt(2))) ** 2
    assert mass == pytest.approx(expected, abs=1e-5)


def test_reciprocal_log_weight_scheme():
    sigma = 0.25
    birth, death = 2.0, 3.0
    pers = death - birth
    cfg = PIConfig(8, (PIGrid((birth - 4 * sigma, birth + 4 * sigma),
                              (pers - 4 * sigma, pers + 4 * sigma), sigma),),
                   weight="reciprocal_log")
    vec = persistence_image(_diagram([(birth, death)]), 0, cfg)
    assert vec.sum() == pytest.approx(1 / np.log1p(pers), rel=1e-3)
    # zero-persistence points are excluded instead of diverging
    assert np.all(persistence_image(_diagram([(1.0, 1.0)]), 0, cfg) == 0)


def test_regular_subgraph_schemes_agree_on_images():
    # 5-cycle: 2-regular, so the degree correction vanishes everywhere
    sub = make_subgraph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
    cfg = PIConfig(5, (PIGrid((0, 1), (0, 4), 0.2),))
    out = {}
    for scheme, fn in (("drnl", drnl), ("degree_drnl", degree_drnl)):
        w = edge_weights(sub, fn(sub, 0, 2))
        out[scheme] = persistence_image(persistence_dim0(sub, w), 0, cfg)
    assert np.array_equal(out["drnl"], out["degree_drnl"])


# -- link_features ----------------------------------------------------

def _toy_graph():
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2), (1, 3), (2, 4)]
    return Graph.from_edges(5, edges)


def _fit_cfg(g, u, v, n=4, max_dim=0):
    from topolink.vectorize import subgraph_diagram_pair
    dgms = subgraph_diagram_pair(g, u, v, 1, 1, "degree_drnl", "target", max_dim, 0)
    return fit_pi_grid(list(dgms), n, max_dim)


def test_link_features_length():
    g = _toy_graph()
    for max_dim in (0, 1):
        cfg = fit_pi_grid([], 4, max_dim) if max_dim else _fit_cfg(g, 0, 1)
        vec = link_features(g, 0, 1, (2, 1), cfg, max_dim=max_dim)
        assert vec.shape == (feature_length(max_dim, cfg.resolution),)
        assert np.all(np.isfinite(vec)) and np.all(vec >= 0)


def test_link_features_swap_symmetry():
    g = _toy_graph()
    cfg = _fit_cfg(g, 0, 1)
    for policy in ("target", "random"):
        for angle in ((1, 1), (2, 1)):
            a = link_features(g, 0, 3, angle, cfg, center_policy=policy, seed=5)
            b = link_features(g, 3, 0, angle, cfg, center_policy=policy, seed=5)
            assert np.array_equal(a, b)


def test_link_features_deterministic():
    g = _toy_graph()
    cfg = _fit_cfg(g, 0, 1)
    a = link_features(g, 1, 4, (2, 0), cfg, center_policy="random", seed=9)
    b = link_features(g, 1, 4, (2, 0), cfg, center_policy="random", seed=9)
    assert np.array_equal(a, b)
    c = link_features(g, 1, 4, (2, 0), cfg, center_policy="random", seed=10)
    assert not np.array_equal(a, c)


def test_link_features_isolated_pair_zero_minus_block():
    g = Graph.from_edges(2, [(0, 1)])
    cfg = PIConfig(4, (PIGrid((0, 1), (0, 3), 0.25),))
    vec = link_features(g, 0, 1, (1, 1), cfg, max_dim=0)
    half = vec.shape[0] // 2
    # without the link: two essential classes dying at cap 0 -> empty image
    assert np.all(vec[:half] == 0)
    # with the link: one merge at W=2 plus the essential class at cap 2
    assert vec[half:].sum() > 0

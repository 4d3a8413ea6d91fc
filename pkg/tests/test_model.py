import numpy as np
import pytest

from topolink import (MLPParams, MultiAngleModel, TrainConfig, auc,
                      mlp_forward, train_mlp, train_multi_angle)
from topolink.model import _forward, _loss_and_grads

from oracles import pairwise_auc


def test_forward_zero_params_gives_half():
    params = MLPParams([np.zeros((4, 3)), np.zeros((3, 1))],
                       [np.zeros(3), np.zeros(1)])
    assert mlp_forward(params, np.ones(4)) == 0.5


def test_forward_open_interval():
    rng = np.random.default_rng(0)
    params = MLPParams([rng.normal(size=(6, 5)), rng.normal(size=(5, 1))],
                       [rng.normal(size=5), rng.normal(size=1)])
    probs = mlp_forward(params, rng.normal(size=(40, 6)))
    assert np.all((probs > 0) & (probs < 1))


def test_forward_single_linear_layer_closed_form():
    w = np.zeros((4, 1))
    w[0, 0] = 1.0
    params = MLPParams([w], [np.zeros(1)])
    x = np.array([np.log(3.0), 0.0, 0.0, 0.0])
    assert mlp_forward(params, x) == pytest.approx(0.75)


def test_forward_dimension_mismatch():
    params = MLPParams([np.zeros((4, 1))], [np.zeros(1)])
    with pytest.raises(ValueError):
        mlp_forward(params, np.ones(5))


def test_auc_examples():
    assert auc([0.9, 0.8, 0.7, 0.2], [1, 1, 0, 0]) == 1.0
    assert auc([0.4, 0.4, 0.4, 0.4], [1, 1, 0, 0]) == 0.5
    assert auc([0.9, 0.4, 0.6, 0.1], [1, 1, 0, 0]) == 0.75
    with pytest.raises(ValueError):
        auc([0.1, 0.2], [1, 1])


def test_auc_matches_pairwise_oracle():
    rng = np.random.default_rng(4)
    for _ in range(30):
        n = int(rng.integers(4, 40))
        labels = rng.integers(0, 2, size=n)
        if labels.min() == labels.max():
            continue
        scores = np.round(rng.uniform(0, 1, size=n), 1)  # force ties
        assert auc(scores, labels) == pytest.approx(pairwise_auc(scores, labels))


def test_auc_invariant_under_monotone_transform():
    rng = np.random.default_rng(9)
    logits = rng.normal(size=50)
    labels = rng.integers(0, 2, size=50)
    labels[0], labels[1] = 0, 1
    probs = 1 / (1 + np.exp(-logits))
    assert auc(logits, labels) == pytest.approx(auc(probs, labels))


def _toy_problem(rng, n_angles=2, n=120, dim=6):
    x = rng.normal(size=(n_angles, n, dim))
    direction = rng.normal(size=dim)
    signal = x[0] @ direction
    y = (signal > np.median(signal)).astype(float)
    x[0, y == 1] += 0.8 * direction / np.linalg.norm(direction)
    return x, y


def _split(x, y, n_train):
    return x[:, :n_train], y[:n_train], x[:, n_train:], y[n_train:]


def test_training_is_deterministic():
    rng = np.random.default_rng(1)
    x, y = _toy_problem(rng)
    tx, ty, vx, vy = _split(x, y, 90)
    cfg = TrainConfig(max_epochs=8, patience=8, seed=3)
    a = train_multi_angle(tx, ty, vx, vy, cfg)
    b = train_multi_angle(tx, ty, vx, vy, cfg)
    for wa, wb in zip(a.weights, b.weights):
        assert np.array_equal(wa, wb)
    assert np.array_equal(a.alpha, b.alpha)
    assert a.best_val_auc == b.best_val_auc


def test_training_loss_decreases_on_separable_toy():
    rng = np.random.default_rng(2)
    x = rng.normal(size=(1, 200, 4))
    y = (x[0, :, 0] > 0).astype(float)
    x[0, y == 1, 0] += 2.0
    tx, ty, vx, vy = _split(x, y, 160)
    cfg = TrainConfig(max_epochs=6, patience=6, seed=0)
    model = train_multi_angle(tx, ty, vx, vy, cfg)
    losses = model.train_loss_history[:5]
    assert len(losses) == 5
    assert all(b < a for a, b in zip(losses, losses[1:]))


def test_single_angle_equals_one_angle_mixture():
    rng = np.random.default_rng(3)
    x, y = _toy_problem(rng, n_angles=1)
    tx, ty, vx, vy = _split(x, y, 90)
    cfg = TrainConfig(max_epochs=5, patience=5, seed=1)
    single = train_mlp(tx[0], ty, vx[0], vy, cfg)
    mixture = train_multi_angle(tx, ty, vx, vy, cfg)
    assert np.array_equal(single.predict(vx), mixture.predict(vx))
    assert mixture.mixture_weights() == pytest.approx([1.0])


def test_mixture_weights_sum_to_one_and_convex_hull():
    rng = np.random.default_rng(5)
    x, y = _toy_problem(rng, n_angles=3)
    tx, ty, vx, vy = _split(x, y, 90)
    model = train_multi_angle(tx, ty, vx, vy,
                              TrainConfig(max_epochs=6, patience=6, seed=2))
    s = model.mixture_weights()
    assert s.sum() == pytest.approx(1.0, abs=1e-9)
    assert np.all(s > 0)
    xs = model.standardize(vx)
    z, _ = _forward(model.weights, model.biases, xs)
    p = model.predict(vx)
    assert np.all(p <= z.max(axis=0) + 1e-12)
    assert np.all(p >= z.min(axis=0) - 1e-12)
    assert np.all((p > 0) & (p < 1))


def test_rejects_one_class_training():
    x = np.zeros((1, 10, 3))
    with pytest.raises(ValueError):
        train_multi_angle(x, np.ones(10), x, np.ones(10), TrainConfig())


def test_rejects_empty_validation():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(1, 10, 3))
    y = np.array([0, 1] * 5, dtype=float)
    with pytest.raises(ValueError):
        train_multi_angle(x, y, x[:, :0], np.empty(0), TrainConfig())


def test_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(patience=300, max_epochs=200).validate()
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=0).validate()


def _fd_grad(fn, arr, eps=1e-6):
    grad = np.zeros_like(arr)
    it = np.nditer(arr, flags=["multi_index"])
    while not it.finished:
        idx = it.multi_index
        orig = arr[idx]
        arr[idx] = orig + eps
        hi = fn()
        arr[idx] = orig - eps
        lo = fn()
        arr[idx] = orig
        grad[idx] = (hi - lo) / (2 * eps)
        it.iternext()
    return grad


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(7)
    n_angles, batch, dim = 2, 6, 5
    x = rng.normal(size=(n_angles, batch, dim))
    y = rng.integers(0, 2, size=batch).astype(float)
    y[0], y[1] = 0.0, 1.0
    weights = [rng.normal(scale=0.6, size=(n_angles, dim, 4)),
               rng.normal(scale=0.6, size=(n_angles, 4, 1))]
    biases = [rng.normal(scale=0.3, size=(n_angles, 4)),
              rng.normal(scale=0.3, size=(n_angles, 1))]
    alpha = rng.normal(scale=0.5, size=n_angles)

    loss, dws, dbs, dalpha = _loss_and_grads(weights, biases, alpha, x, y)

    def loss_only():
        out, _, _, _ = _loss_and_grads(weights, biases, alpha, x, y)
        return out

    for analytic, arr in [(dws[0], weights[0]), (dws[1], weights[1]),
                          (dbs[0], biases[0]), (dbs[1], biases[1]),
                          (dalpha, alpha)]:
        numeric = _fd_grad(loss_only, arr)
        denom = np.maximum(np.abs(numeric), 1e-8)
        rel = np.abs(analytic - numeric) / denom
        mask = np.abs(numeric) > 1e-7  # ReLU kinks make tiny entries noisy
        assert np.all(rel[mask] < 1e-4)


def test_save_load_round_trip(tmp_path):
    rng = np.random.default_rng(11)
    x, y = _toy_problem(rng, n_angles=2)
    tx, ty, vx, vy = _split(x, y, 90)
    model = train_multi_angle(tx, ty, vx, vy,
                              TrainConfig(max_epochs=4, patience=4, seed=4),
                              angles=[(1, 0), (1, 1)])
    from topolink import PIConfig, PIGrid
    model.pi_config = PIConfig(7, (PIGrid((0.0, 1.0), (0.0, 5.5), 1 / 7),))
    path = tmp_path / "model.npz"
    model.save(path)
    loaded = MultiAngleModel.load(path)
    for a, b in zip(model.weights, loaded.weights):
        assert np.array_equal(a, b)
    for a, b in zip(model.biases, loaded.biases):
        assert np.array_equal(a, b)
    assert np.array_equal(model.alpha, loaded.alpha)
    assert np.array_equal(model.feature_mean, loaded.feature_mean)
    assert np.array_equal(model.feature_std, loaded.feature_std)
    assert loaded.angles == ((1, 0), (1, 1))
    assert loaded.pi_config == model.pi_config
    assert loaded.best_val_auc == model.best_val_auc
    assert np.array_equal(model.predict(vx), loaded.predict(vx))


def test_pretrain_angles_path():
    rng = np.random.default_rng(13)
    x, y = _toy_problem(rng, n_angles=3)
    tx, ty, vx, vy = _split(x, y, 90)
    cfg = TrainConfig(max_epochs=5, patience=5, seed=6, pretrain_angles=True)
    model = train_multi_angle(tx, ty, vx, vy, cfg)
    assert model.num_angles == 3
    assert model.mixture_weights().sum() == pytest.approx(1.0, abs=1e-9)
    p = model.predict(vx)
    assert np.all((p > 0) & (p < 1))

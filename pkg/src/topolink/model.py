"""From-scratch MLP classifier, multi-angle softmax mixture, and AUC."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.stats import rankdata

from .vectorize import PIConfig, PIGrid

logger = logging.getLogger(__name__)

_EPS = 1e-7  # probability clip for the cross-entropy


@dataclass
class TrainConfig:
    """Optimizer and schedule knobs; every value the protocol leaves open."""

    learning_rate: float = 1e-3
    batch_size: int = 64
    max_epochs: int = 200
    patience: int = 20
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    hidden_sizes: tuple[int, ...] = (128, 64)
    pretrain_angles: bool = False

    def validate(self) -> None:
        if min(self.learning_rate, self.batch_size, self.max_epochs,
               self.patience, self.beta1, self.beta2, self.adam_eps) <= 0:
            raise ValueError("all training values must be positive")
        if self.patience > self.max_epochs:
            raise ValueError("patience cannot exceed max_epochs")


@dataclass
class MLPParams:
    """One MLP's weight matrices and bias vectors (rectifier hidden, sigmoid out)."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @property
    def layer_sizes(self) -> list[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def mlp_forward(params: MLPParams, x: np.ndarray) -> np.ndarray | float:
    """Probability sigma(Phi(x)) for a single vector or a batch of rows."""
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    h = arr[None, :] if single else arr
    if h.shape[1] != params.weights[0].shape[0]:
        raise ValueError(
            f"input dim {h.shape[1]} does not match model ({params.weights[0].shape[0]})")
    for w, b in zip(params.weights[:-1], params.biases[:-1]):
        h = np.maximum(h @ w + b, 0.0)
    logits = (h @ params.weights[-1] + params.biases[-1])[:, 0]
    probs = _sigmoid(logits)
    return float(probs[0]) if single else probs


def auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Rank-based (Mann-Whitney) AUC with average-rank tie handling."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if not np.isfinite(s).all():
        raise ValueError("scores must be finite")
    pos = y == 1
    n_pos = int(pos.sum())
    n_neg = int(y.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs at least one positive and one negative")
    ranks = rankdata(s)
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


# -- stacked mixture -------------------------------------------------

@dataclass
class MultiAngleModel:
    """One MLP per angle type plus a trainable mixture logit vector.

    Parameters are stacked along the leading angle axis; the mixture
    applies softmax(alpha) to the per-angle probabilities. Feature
    standardization statistics and the image grid travel with the model
    so a saved artifact fully determines inference.
    """

    angles: tuple[tuple[int, int], ...]
    weights: list[np.ndarray]          # per layer, (N, fan_in, fan_out)
    biases: list[np.ndarray]           # per layer, (N, fan_out)
    alpha: np.ndarray                  # (N,)
    feature_mean: np.ndarray           # (N, F)
    feature_std: np.ndarray            # (N, F)
    pi_config: Optional[PIConfig] = None
    labeling_scheme: str = "degree_drnl"
    center_policy: str = "target"
    max_dim: int = 0
    center_seed: int = 0
    best_val_auc: float = float("nan")
    best_epoch: int = -1
    train_loss_history: tuple[float, ...] = ()

    @property
    def num_angles(self) -> int:
        return self.alpha.shape[0]

    def mixture_weights(self) -> np.ndarray:
        return _softmax(self.alpha)

    def angle_mlp(self, i: int) -> MLPParams:
        return MLPParams([w[i] for w in self.weights], [b[i] for b in self.biases])

    def standardize(self, features: np.ndarray) -> np.ndarray:
        return (features - self.feature_mean[:, None, :]) / self.feature_std[:, None, :]

    def predict(self, features: np.ndarray) -> np.ndarray:
        """Mixture probabilities for stacked features of shape (N, B, F)."""
        if features.ndim != 3 or features.shape[0] != self.num_angles:
            raise ValueError("features must be stacked per angle: (N, B, F)")
        x = self.standardize(np.asarray(features, dtype=np.float64))
        z, _ = _forward(self.weights, self.biases, x)
        return _mix(z, self.alpha)

    # -- persistence --------------------------------------------------

    def save(self, path) -> None:
        meta = {
            "angles": [list(a) for a in self.angles],
            "layer_sizes": [self.weights[0].shape[1]] + [w.shape[2] for w in self.weights],
            "labeling_scheme": self.labeling_scheme,
            "center_policy": self.center_policy,
            "max_dim": self.max_dim,
            "center_seed": self.center_seed,
            "best_val_auc": self.best_val_auc,
            "best_epoch": self.best_epoch,
            "pi_config": None if self.pi_config is None else {
                "resolution": self.pi_config.resolution,
                "weight": self.pi_config.weight,
                "grids": [[g.birth_range[0], g.birth_range[1],
                           g.pers_range[0], g.pers_range[1], g.sigma]
                          for g in self.pi_config.grids],
            },
        }
        arrays = {"alpha": self.alpha, "feature_mean": self.feature_mean,
                  "feature_std": self.feature_std,
                  "meta": np.array(json.dumps(meta))}
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            arrays[f"W{i}"] = w
            arrays[f"b{i}"] = b
        with open(path, "wb") as fh:
            np.savez(fh, **arrays)

    @classmethod
    def load(cls, path) -> "MultiAngleModel":
        with np.load(path, allow_pickle=False) as data:
            meta = json.loads(str(data["meta"]))
            n_layers = len(meta["layer_sizes"]) - 1
            weights = [data[f"W{i}"] for i in range(n_layers)]
            biases = [data[f"b{i}"] for i in range(n_layers)]
            cfg = None
            if meta["pi_config"] is not None:
                grids = tuple(PIGrid((g[0], g[1]), (g[2], g[3]), g[4])
                              for g in meta["pi_config"]["grids"])
                cfg = PIConfig(meta["pi_config"]["resolution"], grids,
                               meta["pi_config"]["weight"])
            return cls(tuple(tuple(a) for a in meta["angles"]), weights, biases,
                       data["alpha"], data["feature_mean"], data["feature_std"],
                       cfg, meta["labeling_scheme"], meta["center_policy"],
                       meta["max_dim"], meta["center_seed"],
                       meta["best_val_auc"], meta["best_epoch"])


def _softmax(a: np.ndarray) -> np.ndarray:
    e = np.exp(a - a.max())
    return e / e.sum()


def _forward(weights, biases, x):
    """Stacked forward pass; returns per-angle probabilities and activations."""
    hs = [x]
    h = x
    for w, b in zip(weights[:-1], biases[:-1]):
        h = np.maximum(np.matmul(h, w) + b[:, None, :], 0.0)
        hs.append(h)
    logits = (np.matmul(h, weights[-1]) + biases[-1][:, None, :])[..., 0]
    return _sigmoid(logits), hs


def _mix(z: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    s = _softmax(alpha)
    return (s[:, None] * z).sum(axis=0)


def _bce(p: np.ndarray, y: np.ndarray) -> float:
    # clip only inside the loss so predictions keep their full ranking
    q = np.clip(p, _EPS, 1.0 - _EPS)
    return float(-np.mean(y * np.log(q) + (1.0 - y) * np.log(1.0 - q)))


def _loss_and_grads(weights, biases, alpha, x, y):
    """Mean BCE of the mixture plus gradients for every parameter.

    x is stacked (N, B, F); y is (B,). Returns (loss, dW list, db list,
    dalpha). Used by the trainer and checked against finite differences
    in the test suite.
    """
    z, hs = _forward(weights, biases, x)
    s = _softmax(alpha)
    p = np.clip((s[:, None] * z).sum(axis=0), _EPS, 1.0 - _EPS)
    loss = _bce(p, y)
    batch = y.shape[0]

    dp = (p - y) / (p * (1.0 - p)) / batch          # (B,)
    dz = s[:, None] * dp[None, :]                   # (N, B)
    dlogit = dz * z * (1.0 - z)                     # (N, B)
    ds = (z * dp[None, :]).sum(axis=1)              # (N,)
    dalpha = s * (ds - float(s @ ds))

    dws = [None] * len(weights)
    dbs = [None] * len(biases)
    grad = dlogit[..., None]                        # (N, B, 1)
    for layer in range(len(weights) - 1, -1, -1):
        h_in = hs[layer]
        dws[layer] = np.matmul(h_in.transpose(0, 2, 1), grad)
        dbs[layer] = grad.sum(axis=1)
        if layer:
            grad = np.matmul(grad, weights[layer].transpose(0, 2, 1))
            grad = grad * (hs[layer] > 0)
    return loss, dws, dbs, dalpha


class _Adam:
    """Adaptive-moment updates over an arbitrary list of arrays."""

    def __init__(self, params: list[np.ndarray], cfg: TrainConfig):
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0
        self.cfg = cfg

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        c = self.cfg
        self.t += 1
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= c.beta1
            m += (1 - c.beta1) * g
            v *= c.beta2
            v += (1 - c.beta2) * g * g
            mhat = m / (1 - c.beta1 ** self.t)
            vhat = v / (1 - c.beta2 ** self.t)
            p -= c.learning_rate * mhat / (np.sqrt(vhat) + c.adam_eps)


def _init_params(rng: np.random.Generator, n_angles: int, sizes: list[int]):
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        scale = np.sqrt(2.0 / fan_in)
        weights.append(rng.normal(0.0, scale, size=(n_angles, fan_in, fan_out)))
        biases.append(np.zeros((n_angles, fan_out)))
    return weights, biases


def _standardize_stats(train_x: np.ndarray):
    mean = train_x.mean(axis=1)
    std = train_x.std(axis=1)
    std[std == 0] = 1.0
    return mean, std


def train_multi_angle(train_x: np.ndarray, train_y: Sequence[int],
                      val_x: np.ndarray, val_y: Sequence[int],
                      cfg: TrainConfig,
                      angles: Optional[Sequence[tuple[int, int]]] = None
                      ) -> MultiAngleModel:
    """Train the softmax mixture of per-angle MLPs end to end on BCE.

    Features are stacked (N, B, F) and z-scored per angle with training
    statistics. All N MLPs and the mixture logits are optimized jointly
    (or per angle first when ``cfg.pretrain_angles`` is set); the
    returned parameters are those of the epoch with the best validation
    AUC. Deterministic for a fixed seed.
    """
    cfg.validate()
    train_x = np.asarray(train_x, dtype=np.float64)
    val_x = np.asarray(val_x, dtype=np.float64)
    y = np.asarray(train_y, dtype=np.float64)
    yv = np.asarray(val_y, dtype=np.float64)
    if train_x.ndim != 3:
        raise ValueError("train_x must be stacked per angle: (N, B, F)")
    if y.min() == y.max():
        raise ValueError("training set must contain both classes")
    if yv.size == 0:
        raise ValueError("validation set must be nonempty")
    n_angles = train_x.shape[0]
    if angles is None:
        angles = [(0, 0)] * n_angles

    if cfg.pretrain_angles and n_angles > 1:
        return _train_pretrained(train_x, y, val_x, yv, cfg, angles)

    mean, std = _standardize_stats(train_x)
    xs = (train_x - mean[:, None, :]) / std[:, None, :]
    xv = (val_x - mean[:, None, :]) / std[:, None, :]

    rng = np.random.default_rng(cfg.seed)
    sizes = [train_x.shape[2], *cfg.hidden_sizes, 1]
    weights, biases = _init_params(rng, n_angles, sizes)
    alpha = np.zeros(n_angles)

    state = _fit(weights, biases, alpha, xs, y, xv, yv, cfg, rng,
                 train_alpha=n_angles > 1)
    weights, biases, alpha, best_auc, best_epoch, history = state
    return MultiAngleModel(tuple(tuple(a) for a in angles), weights, biases,
                           alpha, mean, std, best_val_auc=best_auc,
                           best_epoch=best_epoch, train_loss_history=history)


def _fit(weights, biases, alpha, xs, y, xv, yv, cfg, rng, train_alpha):
    params = [*weights, *biases] + ([alpha] if train_alpha else [])
    opt = _Adam(params, cfg)
    n = y.shape[0]
    best = (-np.inf, -1, None)
    stale = 0
    history: list[float] = []
    for epoch in range(cfg.max_epochs):
        perm = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = perm[start:start + cfg.batch_size]
            _, dws, dbs, dalpha = _loss_and_grads(
                weights, biases, alpha, xs[:, idx, :], y[idx])
            grads = [*dws, *dbs] + ([dalpha] if train_alpha else [])
            opt.step(params, grads)
        zt, _ = _forward(weights, biases, xs)
        history.append(_bce(_mix(zt, alpha), y))
        zv, _ = _forward(weights, biases, xv)
        val_auc = auc(_mix(zv, alpha), yv)
        if val_auc > best[0]:
            best = (val_auc, epoch,
                    ([w.copy() for w in weights], [b.copy() for b in biases],
                     alpha.copy()))
            stale = 0
        else:
            stale += 1
            if stale >= cfg.patience:
                break
    val_auc, epoch, snapshot = best
    weights, biases, alpha = snapshot
    return weights, biases, alpha, val_auc, epoch, tuple(history)


def _train_pretrained(train_x, y, val_x, yv, cfg, angles):
    """Separate-then-mix: fit each angle's MLP alone, then only alpha."""
    singles = []
    for i in range(train_x.shape[0]):
        sub_cfg = TrainConfig(**{**cfg.__dict__, "seed": cfg.seed + i,
                                 "pretrain_angles": False})
        singles.append(train_multi_angle(train_x[i:i + 1], y, val_x[i:i + 1],
                                         yv, sub_cfg, angles=[angles[i]]))
    weights = [np.concatenate([m.weights[layer] for m in singles])
               for layer in range(len(singles[0].weights))]
    biases = [np.concatenate([m.biases[layer] for m in singles])
              for layer in range(len(singles[0].biases))]
    mean = np.concatenate([m.feature_mean for m in singles])
    std = np.concatenate([m.feature_std for m in singles])
    xs = (train_x - mean[:, None, :]) / std[:, None, :]
    xv = (val_x - mean[:, None, :]) / std[:, None, :]
    z_train, _ = _forward(weights, biases, xs)
    z_val, _ = _forward(weights, biases, xv)

    alpha = np.zeros(train_x.shape[0])
    opt = _Adam([alpha], cfg)
    rng = np.random.default_rng(cfg.seed)
    n = y.shape[0]
    best = (auc(_mix(z_val, alpha), yv), -1, alpha.copy())
    stale = 0
    for epoch in range(cfg.max_epochs):
        perm = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = perm[start:start + cfg.batch_size]
            z = z_train[:, idx]
            s = _softmax(alpha)
            p = np.clip((s[:, None] * z).sum(axis=0), _EPS, 1.0 - _EPS)
            dp = (p - y[idx]) / (p * (1.0 - p)) / idx.size
            ds = (z * dp[None, :]).sum(axis=1)
            dalpha = s * (ds - float(s @ ds))
            opt.step([alpha], [dalpha])
        val_auc = auc(_mix(z_val, alpha), yv)
        if val_auc > best[0]:
            best = (val_auc, epoch, alpha.copy())
            stale = 0
        else:
            stale += 1
            if stale >= cfg.patience:
                break
    val_auc, epoch, alpha = best
    return MultiAngleModel(tuple(tuple(a) for a in angles), weights, biases,
                           alpha, mean, std, best_val_auc=val_auc,
                           best_epoch=epoch)


def train_mlp(train_x: np.ndarray, train_y: Sequence[int], val_x: np.ndarray,
              val_y: Sequence[int], cfg: TrainConfig) -> MultiAngleModel:
    """Train a single MLP on one angle's features (2-D input (B, F)).

    This is the one-angle mixture: softmax of a single logit is 1, so
    the mixture prediction is exactly the lone MLP's probability.
    """
    return train_multi_angle(np.asarray(train_x)[None, ...], train_y,
                             np.asarray(val_x)[None, ...], val_y, cfg)

"""Dataset splits, training loops and inference wrappers."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ParameterError, ShapeError, TrainingError
from .autodiff import Tensor, mse_loss
from .nn import CnnArchitecture, CnnModel, Module, Seq2SeqArchitecture, Seq2SeqModel
from .phi import PhiMatrix

TRAIN_FRACTION, TEST_FRACTION, VAL_FRACTION = 2 / 3, 2 / 9, 1 / 9


@dataclass(frozen=True)
class DatasetSplit:
    train: np.ndarray
    test: np.ndarray
    validation: np.ndarray

    @classmethod
    def random(cls, n: int, seed: int = 0) -> "DatasetSplit":
        """Shuffle ``n`` indices into train/test/validation at 2/3, 2/9, 1/9."""
        if n < 1:
            raise ParameterError("need at least one sample")
        perm = np.random.default_rng(seed).permutation(n)
        n_test = int(round(n * TEST_FRACTION))
        n_val = int(round(n * VAL_FRACTION))
        if n >= 3:
            n_val = max(n_val, 1)
        n_train = n - n_test - n_val
        return cls(perm[:n_train], perm[n_train:n_train + n_test], perm[n_train + n_test:])


@dataclass
class TrainConfig:
    lr: float = 3e-2
    momentum: float = 0.9
    batch_size: int = 16
    max_epochs: int = 200
    patience: int = 20
    seed: int = 0
    scale: float = 1000.0
    optimizer: str = "sgd"  # "sgd" (momentum) or "adam"

    def __post_init__(self):
        if self.optimizer not in ("sgd", "adam"):
            raise ParameterError(f"unknown optimizer {self.optimizer!r}")
        if self.batch_size < 1 or self.max_epochs < 0 or self.lr <= 0:
            raise ParameterError("invalid training configuration")


@dataclass
class TrainingCurve:
    rows: list[tuple[int, float, float]] = field(default_factory=list)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["epoch", "train_loss", "val_loss"])
            for epoch, tr, va in self.rows:
                w.writerow([epoch, repr(tr), repr(va)])


class _Optimizer:
    def __init__(self, params: dict[str, Tensor], cfg: TrainConfig):
        self.params = params
        self.cfg = cfg
        self.m = {k: np.zeros_like(p.data) for k, p in params.items()}
        self.v = {k: np.zeros_like(p.data) for k, p in params.items()}
        self.t = 0

    def step(self) -> None:
        cfg = self.cfg
        self.t += 1
        for k, p in self.params.items():
            g = p.grad
            if cfg.optimizer == "sgd":
                self.m[k] = cfg.momentum * self.m[k] - cfg.lr * g
                p.data = p.data + self.m[k]
            else:
                b1, b2 = 0.9, 0.999
                self.m[k] = b1 * self.m[k] + (1 - b1) * g
                self.v[k] = b2 * self.v[k] + (1 - b2) * g * g
                mh = self.m[k] / (1 - b1 ** self.t)
                vh = self.v[k] / (1 - b2 ** self.t)
                p.data = p.data - cfg.lr * mh / (np.sqrt(vh) + 1e-8)


def _batched_loss(model: Module, x: np.ndarray, y: np.ndarray, batch: int = 256) -> float:
    if len(x) == 0:
        return float("nan")
    total = 0.0
    for i in range(0, len(x), batch):
        pred = model.forward(x[i:i + batch]).data
        total += float(np.sum((pred - y[i:i + batch]) ** 2))
    return total / y.size


def fit(model: Module, x: np.ndarray, y: np.ndarray, split: DatasetSplit, cfg: TrainConfig) -> TrainingCurve:
    """Minibatch MSE training with early stopping on the validation split.

    The model ends with the parameters of the best validation epoch, where the
    untrained model counts as epoch 0. Without a validation split the train
    loss is monitored instead.
    """
    rng = np.random.default_rng(cfg.seed)
    params = model.parameters()
    opt = _Optimizer(params, cfg)
    val_idx = split.validation if len(split.validation) else split.train
    xv, yv = x[val_idx], y[val_idx]
    xt, yt = x[split.train], y[split.train]

    curve = TrainingCurve()
    best = _batched_loss(model, xv, yv)
    best_weights = model.get_weights()
    curve.rows.append((0, _batched_loss(model, xt, yt), best))
    stale = 0
    for epoch in range(1, cfg.max_epochs + 1):
        order = rng.permutation(len(xt))
        running = 0.0
        for i in range(0, len(order), cfg.batch_size):
            idx = order[i:i + cfg.batch_size]
            model.zero_grad()
            loss = mse_loss(model.forward(xt[idx]), yt[idx])
            if not np.isfinite(loss.data):
                model.set_weights(best_weights)
                raise TrainingError(f"loss became non-finite at epoch {epoch}", checkpoint=best_weights)
            loss.backward()
            opt.step()
            running += float(loss.data) * len(idx)
        val = _batched_loss(model, xv, yv)
        curve.rows.append((epoch, running / len(order), val))
        if not np.isfinite(val):
            model.set_weights(best_weights)
            raise TrainingError(f"validation loss became non-finite at epoch {epoch}", checkpoint=best_weights)
        if val < best:
            best, best_weights, stale = val, model.get_weights(), 0
        else:
            stale += 1
            if stale >= cfg.patience:
                break
    model.set_weights(best_weights)
    return curve


# CNN ----------------------------------------------------------------------

def cnn_inputs(phis: list[PhiMatrix], scale: float) -> np.ndarray:
    return np.stack([p.normalized(scale) for p in phis])


def cnn_labels(phis: list[PhiMatrix], tracks, scale: float) -> np.ndarray:
    tracks = np.asarray(tracks, dtype=float)
    centers = np.stack([p.center for p in phis])
    return (tracks - centers[:, None, :]) / scale


def train_cnn(dataset: list[tuple[PhiMatrix, np.ndarray]], split: DatasetSplit, cfg: TrainConfig,
              arch: CnnArchitecture | None = None) -> CnnModel:
    if not dataset:
        raise ParameterError("dataset is empty")
    phis = [d[0] for d in dataset]
    tracks = np.stack([np.asarray(d[1], dtype=float) for d in dataset])
    if tracks.shape[1:] != (phis[0].n_spots, 2):
        raise ShapeError(f"labels must be (N, 2) per sample, got {tracks.shape[1:]}")
    arch = arch or CnnArchitecture(n_spots=phis[0].n_spots, n_cols=phis[0].n_meas + 3)
    model = CnnModel(arch, seed=cfg.seed)
    model.scale = cfg.scale
    model.curve = fit(model, cnn_inputs(phis, cfg.scale), cnn_labels(phis, tracks, cfg.scale), split, cfg)
    return model


def cnn_predict(model: CnnModel, phis: list[PhiMatrix]) -> np.ndarray:
    """Absolute ``(B, N, 2)`` track estimates."""
    scale = model.scale
    out = model.forward(cnn_inputs(phis, scale)).data * scale
    return out + np.stack([p.center for p in phis])[:, None, :]


def cnn_forward(model: CnnModel, phi: PhiMatrix) -> np.ndarray:
    return cnn_predict(model, [phi])[0]


# LSTM ---------------------------------------------------------------------

def lstm_inputs(tracks: np.ndarray, scale: float) -> tuple[np.ndarray, np.ndarray]:
    """Express each track relative to its last observed point, divided by ``scale``."""
    tracks = np.asarray(tracks, dtype=float)
    ref = tracks[:, -1, :]
    return (tracks - ref[:, None, :]) / scale, ref


def train_lstm(pairs: list[tuple[np.ndarray, np.ndarray]], split: DatasetSplit, cfg: TrainConfig,
               hidden: int = 64) -> Seq2SeqModel:
    if not pairs:
        raise ParameterError("dataset is empty")
    u = np.stack([np.asarray(p[0], dtype=float) for p in pairs])
    f = np.stack([np.asarray(p[1], dtype=float) for p in pairs])
    x, ref = lstm_inputs(u, cfg.scale)
    y = (f - ref[:, None, :]) / cfg.scale
    model = Seq2SeqModel(Seq2SeqArchitecture(horizon=f.shape[1], hidden=hidden), seed=cfg.seed)
    model.scale = cfg.scale
    model.curve = fit(model, x, y, split, cfg)
    return model


def lstm_predict(model: Seq2SeqModel, tracks) -> np.ndarray:
    scale = model.scale
    x, ref = lstm_inputs(tracks, scale)
    return model.forward(x).data * scale + ref[:, None, :]


def lstm_forecast(model: Seq2SeqModel, u_hat) -> np.ndarray:
    if model.arch.horizon < 1:
        raise ParameterError("horizon must be >= 1")
    return lstm_predict(model, np.asarray(u_hat, dtype=float)[None])[0]


def persistence_forecast(u_hat, horizon: int) -> np.ndarray:
    """Baseline forecast: the last estimate held for ``horizon`` steps."""
    if horizon < 1:
        raise ParameterError("horizon must be >= 1")
    last = np.asarray(u_hat, dtype=float)[-1]
    return np.repeat(last[None, :], horizon, axis=0)

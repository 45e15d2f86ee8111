"""Training loop (full-batch Adam over exact BPTT gradients) and evaluation.

Everything here is deterministic given the config seed: initialization
comes from the shared splitmix64 stream, training is full-batch (no
shuffling), and both backends are sequential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import EmptyInput, InvalidConfig, LengthMismatch, NonFiniteLoss
from .model import ModelParams, init_params, param_count
from .panel import Month
from .preprocess import NormalizationStats, SupervisedDataset, denormalize


@dataclass(frozen=True)
class TrainConfig:
    hidden_size: int = 32
    epochs: int = 200
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    grad_clip_norm: float = 5.0
    seed: int = 5

    def __post_init__(self):
        if self.hidden_size < 1:
            raise InvalidConfig(f"hidden_size must be >= 1, got {self.hidden_size}")
        if self.epochs < 1:
            raise InvalidConfig(f"epochs must be >= 1, got {self.epochs}")
        for name in ("learning_rate", "beta1", "beta2", "epsilon", "grad_clip_norm"):
            if getattr(self, name) <= 0:
                raise InvalidConfig(f"{name} must be > 0")
        if self.beta1 >= 1 or self.beta2 >= 1:
            raise InvalidConfig("beta1/beta2 must be < 1")


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    step_count: int = 0

    @classmethod
    def zeros(cls, n_params: int) -> "AdamState":
        return cls(np.zeros(n_params), np.zeros(n_params), 0)


@dataclass(frozen=True)
class LossCurve:
    """Per-epoch (epoch, train_mse, test_mse) in normalized units.

    train_mse is measured before the epoch's parameter update (the loss the
    gradient was computed from); test_mse is measured after it.
    """

    entries: tuple[tuple[int, float, float], ...]

    def train_mse(self) -> np.ndarray:
        return np.array([e[1] for e in self.entries])

    def test_mse(self) -> np.ndarray:
        return np.array([e[2] for e in self.entries])

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("epoch,train_mse,test_mse\n")
            for epoch, train, test in self.entries:
                fh.write(f"{int(epoch)},{float(train)!r},{float(test)!r}\n")

    @classmethod
    def read_csv(cls, path) -> "LossCurve":
        entries = []
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != "epoch,train_mse,test_mse":
                raise ValueError(f"unexpected loss-curve header: {header}")
            for line in fh:
                epoch_s, train_s, test_s = line.strip().split(",")
                entries.append((int(epoch_s), float(train_s), float(test_s)))
        return cls(tuple(entries))


@dataclass(frozen=True)
class EvalReport:
    mse_normalized: float
    mse_notch: float
    baseline_mse: float
    #: (target_month, predicted_change, actual_change) in notch units.
    predictions: tuple[tuple[Month | None, float, float], ...]

    def write_report(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"mse_normalized={float(self.mse_normalized)!r}\n")
            fh.write(f"mse_notch={float(self.mse_notch)!r}\n")
            fh.write(f"baseline_mse={float(self.baseline_mse)!r}\n")
            fh.write(f"n_test={len(self.predictions)}\n")

    def write_predictions_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("target_month,predicted_change,actual_change\n")
            for month, pred, actual in self.predictions:
                label = str(month) if month is not None else ""
                fh.write(f"{label},{float(pred)!r},{float(actual)!r}\n")


def mse_loss(predictions, targets) -> float:
    preds = np.asarray(predictions, dtype=np.float64)
    targs = np.asarray(targets, dtype=np.float64)
    if preds.shape != targs.shape:
        raise LengthMismatch(f"predictions {preds.shape} vs targets {targs.shape}")
    if preds.size == 0:
        raise EmptyInput("mse_loss needs at least one prediction")
    diff = preds - targs
    with np.errstate(over="ignore"):  # divergence is reported as NonFiniteLoss
        return float(diff @ diff / preds.size)


def clip_gradients(grads: np.ndarray, max_norm: float) -> np.ndarray:
    """Scale the whole gradient vector down to L2 norm max_norm if above."""
    if max_norm <= 0:
        raise ValueError(f"max_norm must be > 0, got {max_norm}")
    norm = float(np.linalg.norm(grads))
    if norm <= max_norm:
        return grads
    return grads * (max_norm / norm)


def adam_step(theta: np.ndarray, grads: np.ndarray, state: AdamState,
              config: TrainConfig) -> tuple[np.ndarray, AdamState]:
    """One bias-corrected Adam update on the flat parameter vector."""
    if theta.shape != grads.shape or theta.shape != state.m.shape:
        raise LengthMismatch("params, grads and moments must share one shape")
    t = state.step_count + 1
    m = config.beta1 * state.m + (1.0 - config.beta1) * grads
    v = config.beta2 * state.v + (1.0 - config.beta2) * grads * grads
    m_hat = m / (1.0 - config.beta1 ** t)
    v_hat = v / (1.0 - config.beta2 ** t)
    theta_new = theta - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.epsilon)
    return theta_new, AdamState(m, v, t)


def train(config: TrainConfig, train_set: SupervisedDataset,
          test_set: SupervisedDataset) -> tuple[ModelParams, LossCurve]:
    """Full-batch Adam for ``config.epochs`` epochs; deterministic per seed.

    Raises NonFiniteLoss as soon as either loss stops being finite.
    """
    if len(train_set) == 0 or len(test_set) == 0:
        raise EmptyInput("train and test sets must both be non-empty")
    h = config.hidden_size
    theta = init_params(h, config.seed).flatten()
    state = AdamState.zeros(param_count(h))

    x_train = train_set.inputs()
    y_train = train_set.targets()
    x_test = test_set.inputs()
    y_test = test_set.targets()

    entries = []
    # overflow inside a pass is not an error state here: it surfaces as a
    # non-finite loss and is reported as NonFiniteLoss below
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(1, config.epochs + 1):
            preds, gates, cells, hiddens = backend.forward_batch(theta, h, x_train)
            train_mse = mse_loss(preds, y_train)
            if not math.isfinite(train_mse):
                raise NonFiniteLoss(epoch)
            grad = backend.backward_batch(theta, h, x_train, y_train, preds,
                                          gates, cells, hiddens)
            grad = clip_gradients(grad, config.grad_clip_norm)
            theta, state = adam_step(theta, grad, state, config)

            test_preds = backend.forward_batch(theta, h, x_test)[0]
            test_mse = mse_loss(test_preds, y_test)
            if not math.isfinite(test_mse):
                raise NonFiniteLoss(epoch)
            entries.append((epoch, train_mse, test_mse))

    return ModelParams.from_flat(theta, h), LossCurve(tuple(entries))


def predict(params: ModelParams, inputs: np.ndarray) -> np.ndarray:
    """Batch predictions for (N, W) normalized input windows."""
    inputs = np.ascontiguousarray(inputs, dtype=np.float64)
    return backend.forward_batch(params.flatten(), params.hidden_size, inputs)[0]


def evaluate(params: ModelParams, test_set: SupervisedDataset,
             intl_stats: NormalizationStats) -> EvalReport:
    """Normalized MSE, notch-unit MSE, and the persistence baseline.

    The baseline predicts each target as the previous month's observed
    international change; the notch-unit MSE is the normalized MSE scaled
    by the target std squared.
    """
    if len(test_set) == 0:
        raise EmptyInput("evaluate needs a non-empty test set")
    preds = predict(params, test_set.inputs())
    targets = test_set.targets()
    mse_norm = mse_loss(preds, targets)
    mse_notch = mse_norm * intl_stats.std ** 2
    baseline = mse_loss(test_set.prev_targets(), targets)

    preds_notch = denormalize(preds, intl_stats)
    targets_notch = denormalize(targets, intl_stats)
    rows = tuple(
        (month, float(p), float(a))
        for month, p, a in zip(test_set.target_months(), preds_notch, targets_notch)
    )
    return EvalReport(mse_norm, mse_notch, baseline, rows)


def save_checkpoint(params: ModelParams, lookback: int, path) -> None:
    """Flat text checkpoint: 'H=<int> W=<int>' then one parameter per line."""
    theta = params.flatten()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"H={params.hidden_size} W={lookback}\n")
        for value in theta:
            fh.write(f"{float(value)!r}\n")


def load_checkpoint(path) -> tuple[ModelParams, int]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        try:
            h_part, w_part = header.split()
            hidden = int(h_part.removeprefix("H="))
            lookback = int(w_part.removeprefix("W="))
        except ValueError:
            raise ValueError(f"bad checkpoint header: {header!r}") from None
        theta = np.array([float(line) for line in fh if line.strip()])
    if theta.size != param_count(hidden):
        raise ValueError(
            f"checkpoint has {theta.size} parameters, expected {param_count(hidden)}"
        )
    return ModelParams.from_flat(theta, hidden), lookback

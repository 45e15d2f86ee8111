"""LSTM + linear-output regressor: parameters, init, and the readable
single-sample forward pass.

The network maps a window of W scalar inputs through one LSTM layer of
``hidden_size`` units to a single linear output node. Batched training uses
the kernels behind :mod:`notchcast.backend`; the step/forward functions here
are the plain-numpy formulation the kernels are checked against.

Parameter vector layout (``flatten``/``from_flat`` are exact inverses):
for each gate in order (input, forget, output, candidate):
``w_x`` (H), ``w_h`` (H*H, row-major), ``b`` (H); then the dense output
weights (H) and bias (1). Total 4*(H + H^2 + H) + H + 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .prng import Prng

#: Gate order used everywhere: input, forget, output, candidate.
GATES = ("i", "f", "o", "c")


@dataclass(frozen=True)
class LstmParams:
    w_x: np.ndarray  # (4, H) input weights per gate
    w_h: np.ndarray  # (4, H, H) recurrent weights per gate
    b: np.ndarray    # (4, H) biases per gate

    def __post_init__(self):
        for arr in (self.w_x, self.w_h, self.b):
            arr.setflags(write=False)

    @property
    def hidden_size(self) -> int:
        return self.w_x.shape[1]


@dataclass(frozen=True)
class DenseParams:
    w: np.ndarray  # (H,)
    b: float

    def __post_init__(self):
        self.w.setflags(write=False)


@dataclass(frozen=True)
class ModelParams:
    lstm: LstmParams
    dense: DenseParams

    @property
    def hidden_size(self) -> int:
        return self.lstm.hidden_size

    def flatten(self) -> np.ndarray:
        parts = []
        for g in range(4):
            parts += [self.lstm.w_x[g], self.lstm.w_h[g].ravel(), self.lstm.b[g]]
        parts += [self.dense.w, np.array([self.dense.b])]
        return np.concatenate(parts)

    @classmethod
    def from_flat(cls, theta: np.ndarray, hidden_size: int) -> "ModelParams":
        h = hidden_size
        expected = param_count(h)
        theta = np.asarray(theta, dtype=np.float64)
        if theta.shape != (expected,):
            raise ValueError(f"expected {expected} parameters for H={h}, got {theta.shape}")
        w_x = np.empty((4, h))
        w_h = np.empty((4, h, h))
        b = np.empty((4, h))
        per_gate = 2 * h + h * h
        for g in range(4):
            base = g * per_gate
            w_x[g] = theta[base:base + h]
            w_h[g] = theta[base + h:base + h + h * h].reshape(h, h)
            b[g] = theta[base + h + h * h:base + per_gate]
        dense_w = theta[4 * per_gate:4 * per_gate + h].copy()
        dense_b = float(theta[-1])
        return cls(LstmParams(w_x, w_h, b), DenseParams(dense_w, dense_b))


def param_count(hidden_size: int) -> int:
    return 4 * (2 * hidden_size + hidden_size * hidden_size) + hidden_size + 1


def init_params(hidden_size: int, seed: int) -> ModelParams:
    """Glorot-uniform weights, zero biases except forget-gate bias = 1.

    Weight draws come from the shared splitmix64 stream in flatten order,
    so the same (hidden_size, seed) always yields identical parameters.
    """
    if hidden_size < 1:
        raise ValueError(f"hidden_size must be >= 1, got {hidden_size}")
    h = hidden_size
    rng = Prng(seed)

    def glorot(fan_in: int, fan_out: int, n: int) -> np.ndarray:
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        return np.array([rng.uniform_in(-limit, limit) for _ in range(n)])

    w_x = np.empty((4, h))
    w_h = np.empty((4, h, h))
    b = np.zeros((4, h))
    for g in range(4):
        w_x[g] = glorot(1, h, h)
        w_h[g] = glorot(h, h, h * h).reshape(h, h)
    b[1, :] = 1.0  # forget gate: start remembering
    dense_w = glorot(h, 1, h)
    return ModelParams(LstmParams(w_x, w_h, b), DenseParams(dense_w, 0.0))


class StepCache(NamedTuple):
    """Gate activations and states needed for exact backprop of one step."""

    x: float
    h_prev: np.ndarray
    c_prev: np.ndarray
    i: np.ndarray
    f: np.ndarray
    o: np.ndarray
    g: np.ndarray  # tanh candidate
    c: np.ndarray


def sigmoid(x):
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-x))


def lstm_step(params: ModelParams, x_t: float, h_prev: np.ndarray,
              c_prev: np.ndarray) -> tuple[np.ndarray, np.ndarray, StepCache]:
    """One LSTM cell update for a scalar input.

    i, f, o are sigmoid gates, the candidate is tanh; c = f*c_prev + i*cand
    and h = o * tanh(c).
    """
    lstm = params.lstm
    pre = lstm.w_x * x_t + lstm.w_h @ h_prev + lstm.b  # (4, H)
    i = sigmoid(pre[0])
    f = sigmoid(pre[1])
    o = sigmoid(pre[2])
    g = np.tanh(pre[3])
    c = f * c_prev + i * g
    h = o * np.tanh(c)
    return h, c, StepCache(float(x_t), h_prev, c_prev, i, f, o, g, c)


def model_forward(params: ModelParams, window) -> tuple[float, list[StepCache]]:
    """Run the window through the LSTM from zero state; linear readout."""
    h = np.zeros(params.hidden_size)
    c = np.zeros(params.hidden_size)
    caches = []
    for x_t in np.asarray(window, dtype=np.float64):
        h, c, cache = lstm_step(params, x_t, h, c)
        caches.append(cache)
    prediction = float(params.dense.w @ h + params.dense.b)
    return prediction, caches

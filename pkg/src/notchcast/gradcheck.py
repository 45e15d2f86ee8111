"""Gradient verification: analytic BPTT vs central finite differences."""

from __future__ import annotations

import numpy as np

from . import backend
from .model import init_params
from .prng import Prng
from .training import mse_loss


def batch_loss(theta: np.ndarray, hidden: int, windows: np.ndarray,
               targets: np.ndarray) -> float:
    preds = backend.forward_batch(theta, hidden, windows)[0]
    return mse_loss(preds, targets)


def analytic_grad(theta: np.ndarray, hidden: int, windows: np.ndarray,
                  targets: np.ndarray) -> np.ndarray:
    preds, gates, cells, hiddens = backend.forward_batch(theta, hidden, windows)
    return backend.backward_batch(theta, hidden, windows, targets, preds,
                                  gates, cells, hiddens)


def finite_difference_grad(theta: np.ndarray, hidden: int, windows: np.ndarray,
                           targets: np.ndarray, eps: float = 1e-5) -> np.ndarray:
    """Central differences of the batch MSE, one parameter at a time."""
    grad = np.empty_like(theta)
    probe = theta.copy()
    for idx in range(theta.size):
        original = probe[idx]
        probe[idx] = original + eps
        up = batch_loss(probe, hidden, windows, targets)
        probe[idx] = original - eps
        down = batch_loss(probe, hidden, windows, targets)
        probe[idx] = original
        grad[idx] = (up - down) / (2.0 * eps)
    return grad


def relative_errors(analytic: np.ndarray, numeric: np.ndarray) -> np.ndarray:
    """Per-parameter |a - n| / max(1e-8, |a| + |n|)."""
    denom = np.maximum(1e-8, np.abs(analytic) + np.abs(numeric))
    return np.abs(analytic - numeric) / denom


def grad_check(hidden: int, lookback: int, batch: int, seed: int,
               eps: float = 1e-5) -> float:
    """Worst per-parameter relative error on a random small problem.

    The batch (gaussian windows and targets) and the parameters are both
    derived from ``seed`` through the shared splitmix64 stream.
    """
    rng = Prng(seed)
    windows = np.array(
        [[rng.gaussian() for _ in range(lookback)] for _ in range(batch)]
    )
    targets = np.array([rng.gaussian() for _ in range(batch)])
    theta = init_params(hidden, rng.next_u64()).flatten()

    numeric = finite_difference_grad(theta, hidden, windows, targets, eps)
    analytic = analytic_grad(theta, hidden, windows, targets)
    return float(relative_errors(analytic, numeric).max())

"""Pure-numpy batch kernels: LSTM forward over windows and exact BPTT.

This is the fallback backend when the compiled extension is unavailable,
and the semantic reference it is tested against. Both backends share one
contract:

``forward_batch(theta, hidden, windows)`` returns
``(preds, gates, cells, hiddens)`` where ``gates`` is (N, W, 4, H) in gate
order (input, forget, output, candidate), ``cells``/``hiddens`` are
(N, W, H) per-step states, and ``preds`` is (N,).

``backward_batch(...)`` consumes those caches and returns the gradient of
the batch mean-squared error with respect to the flat parameter vector.
"""

from __future__ import annotations

import numpy as np


def _views(theta: np.ndarray, hidden: int):
    """Slice the flat vector into per-gate views (no copies)."""
    h = hidden
    per_gate = 2 * h + h * h
    w_x, w_h, b = [], [], []
    for g in range(4):
        base = g * per_gate
        w_x.append(theta[base:base + h])
        w_h.append(theta[base + h:base + h + h * h].reshape(h, h))
        b.append(theta[base + h + h * h:base + per_gate])
    dense_w = theta[4 * per_gate:4 * per_gate + h]
    dense_b = theta[4 * per_gate + h]
    return w_x, w_h, b, dense_w, dense_b


def _sigmoid(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-x))


def forward_batch(theta: np.ndarray, hidden: int, windows: np.ndarray):
    w_x, w_h, b, dense_w, dense_b = _views(theta, hidden)
    n, steps = windows.shape
    h_t = np.zeros((n, hidden))
    c_t = np.zeros((n, hidden))
    gates = np.empty((n, steps, 4, hidden))
    cells = np.empty((n, steps, hidden))
    hiddens = np.empty((n, steps, hidden))
    for t in range(steps):
        x = windows[:, t:t + 1]  # (N, 1)
        i = _sigmoid(x * w_x[0] + h_t @ w_h[0].T + b[0])
        f = _sigmoid(x * w_x[1] + h_t @ w_h[1].T + b[1])
        o = _sigmoid(x * w_x[2] + h_t @ w_h[2].T + b[2])
        g = np.tanh(x * w_x[3] + h_t @ w_h[3].T + b[3])
        c_t = f * c_t + i * g
        h_t = o * np.tanh(c_t)
        gates[:, t, 0] = i
        gates[:, t, 1] = f
        gates[:, t, 2] = o
        gates[:, t, 3] = g
        cells[:, t] = c_t
        hiddens[:, t] = h_t
    preds = hiddens[:, -1] @ dense_w + dense_b
    return preds, gates, cells, hiddens


def backward_batch(theta: np.ndarray, hidden: int, windows: np.ndarray,
                   targets: np.ndarray, preds: np.ndarray, gates: np.ndarray,
                   cells: np.ndarray, hiddens: np.ndarray) -> np.ndarray:
    w_x, w_h, b, dense_w, dense_b = _views(theta, hidden)
    n, steps = windows.shape
    h = hidden
    per_gate = 2 * h + h * h

    grad = np.zeros_like(theta)
    g_w_x = np.zeros((4, h))
    g_w_h = [np.zeros((h, h)) for _ in range(4)]
    g_b = np.zeros((4, h))

    dpred = 2.0 * (preds - targets) / n  # d(batch MSE)/d(pred)
    grad[4 * per_gate:4 * per_gate + h] = hiddens[:, -1].T @ dpred
    grad[4 * per_gate + h] = dpred.sum()

    dh = np.outer(dpred, dense_w)  # (N, H)
    dc = np.zeros((n, h))
    for t in range(steps - 1, -1, -1):
        i = gates[:, t, 0]
        f = gates[:, t, 1]
        o = gates[:, t, 2]
        g = gates[:, t, 3]
        tanh_c = np.tanh(cells[:, t])
        if t > 0:
            c_prev = cells[:, t - 1]
            h_prev = hiddens[:, t - 1]
        else:
            c_prev = np.zeros((n, h))
            h_prev = np.zeros((n, h))

        dc = dc + dh * o * (1.0 - tanh_c * tanh_c)
        da = np.empty((4, n, h))
        da[0] = dc * g * i * (1.0 - i)
        da[1] = dc * c_prev * f * (1.0 - f)
        da[2] = dh * tanh_c * o * (1.0 - o)
        da[3] = dc * i * (1.0 - g * g)

        x = windows[:, t]
        dh = np.zeros((n, h))
        for gate in range(4):
            g_w_x[gate] += da[gate].T @ x
            g_w_h[gate] += da[gate].T @ h_prev
            g_b[gate] += da[gate].sum(axis=0)
            dh += da[gate] @ w_h[gate]
        dc = dc * f

    for gate in range(4):
        base = gate * per_gate
        grad[base:base + h] = g_w_x[gate]
        grad[base + h:base + h + h * h] = g_w_h[gate].ravel()
        grad[base + h + h * h:base + per_gate] = g_b[gate]
    return grad

"""LSTM cell, parameter layout, initialization, and backend agreement."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from notchcast import _reference
from notchcast.backend import BACKEND, backward_batch, forward_batch
from notchcast.model import (
    DenseParams,
    LstmParams,
    ModelParams,
    init_params,
    lstm_step,
    model_forward,
    param_count,
)


def zero_params(h):
    return ModelParams(
        LstmParams(np.zeros((4, h)), np.zeros((4, h, h)), np.zeros((4, h))),
        DenseParams(np.zeros(h), 0.0),
    )


class TestParamLayout:
    def test_param_count_formula(self):
        assert param_count(4) == 4 * (4 + 16 + 4) + 4 + 1 == 101
        assert param_count(1) == 4 * (1 + 1 + 1) + 1 + 1 == 14
        for h in range(1, 9):
            assert init_params(h, 0).flatten().shape == (param_count(h),)

    def test_flatten_unflatten_bitwise_round_trip(self):
        for h in (1, 2, 3, 5, 8):
            params = init_params(h, h * 31 + 1)
            theta = params.flatten()
            back = ModelParams.from_flat(theta, h)
            np.testing.assert_array_equal(back.flatten(), theta)
            np.testing.assert_array_equal(back.lstm.w_x, params.lstm.w_x)
            np.testing.assert_array_equal(back.lstm.w_h, params.lstm.w_h)
            np.testing.assert_array_equal(back.lstm.b, params.lstm.b)
            np.testing.assert_array_equal(back.dense.w, params.dense.w)
            assert back.dense.b == params.dense.b

    def test_from_flat_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            ModelParams.from_flat(np.zeros(100), 4)


class TestInit:
    def test_deterministic(self):
        a = init_params(6, 99).flatten()
        b = init_params(6, 99).flatten()
        np.testing.assert_array_equal(a, b)
        c = init_params(6, 100).flatten()
        assert not np.array_equal(a, c)

    def test_forget_bias_one_other_biases_zero(self):
        params = init_params(5, 3)
        np.testing.assert_array_equal(params.lstm.b[1], np.ones(5))
        np.testing.assert_array_equal(params.lstm.b[0], np.zeros(5))
        np.testing.assert_array_equal(params.lstm.b[2], np.zeros(5))
        np.testing.assert_array_equal(params.lstm.b[3], np.zeros(5))
        assert params.dense.b == 0.0

    def test_glorot_bounds_per_block(self):
        h = 7
        params = init_params(h, 11)
        lim_x = math.sqrt(6.0 / (1 + h))
        lim_h = math.sqrt(6.0 / (h + h))
        lim_d = math.sqrt(6.0 / (h + 1))
        assert np.abs(params.lstm.w_x).max() < lim_x
        assert np.abs(params.lstm.w_h).max() < lim_h
        assert np.abs(params.dense.w).max() < lim_d

    def test_rejects_nonpositive_hidden(self):
        with pytest.raises(ValueError):
            init_params(0, 1)


class TestLstmStep:
    def test_zero_params_zero_state(self):
        params = zero_params(3)
        h, c, cache = lstm_step(params, 5.0, np.zeros(3), np.zeros(3))
        np.testing.assert_array_equal(h, np.zeros(3))
        np.testing.assert_array_equal(c, np.zeros(3))
        np.testing.assert_array_equal(cache.i, np.full(3, 0.5))
        np.testing.assert_array_equal(cache.g, np.zeros(3))

    def test_hand_computed_step_h2(self):
        # independent scalar recomputation of the four gate equations with
        # small hand-set weights, using math.* only
        w_x = np.array([[0.1, -0.2], [0.3, 0.0], [-0.1, 0.4], [0.2, 0.2]])
        w_h = np.array([
            [[0.05, -0.05], [0.10, 0.00]],
            [[0.00, 0.20], [-0.10, 0.10]],
            [[0.30, 0.00], [0.00, -0.30]],
            [[0.10, 0.10], [0.20, -0.20]],
        ])
        b = np.array([[0.01, 0.02], [1.00, 1.00], [-0.01, 0.00], [0.03, -0.03]])
        params = ModelParams(LstmParams(w_x, w_h, b), DenseParams(np.array([0.5, -0.5]), 0.25))
        x = 0.7
        h_prev = np.array([0.2, -0.1])
        c_prev = np.array([0.05, 0.15])

        def sig(v):
            return 1.0 / (1.0 + math.exp(-v))

        expect_h, expect_c = [], []
        for k in range(2):
            pre = [
                w_x[g][k] * x + w_h[g][k][0] * h_prev[0] + w_h[g][k][1] * h_prev[1] + b[g][k]
                for g in range(4)
            ]
            i_k, f_k, o_k = sig(pre[0]), sig(pre[1]), sig(pre[2])
            g_k = math.tanh(pre[3])
            c_k = f_k * c_prev[k] + i_k * g_k
            expect_c.append(c_k)
            expect_h.append(o_k * math.tanh(c_k))

        h, c, cache = lstm_step(params, x, h_prev, c_prev)
        np.testing.assert_allclose(h, expect_h, rtol=0, atol=1e-15)
        np.testing.assert_allclose(c, expect_c, rtol=0, atol=1e-15)

    def test_hidden_state_bound_and_gate_ranges(self):
        # |h| < 1 for random params/inputs: h = o * tanh(c) with o in (0,1).
        # Scales stay below sigmoid's float64 saturation point (~36.7) so
        # the mathematically strict bounds remain strict in floats too.
        rng = np.random.default_rng(17)
        for _ in range(200):
            h_size = int(rng.integers(1, 6))
            params = ModelParams(
                LstmParams(
                    rng.normal(scale=1.5, size=(4, h_size)),
                    rng.normal(scale=1.5, size=(4, h_size, h_size)),
                    rng.normal(scale=1.5, size=(4, h_size)),
                ),
                DenseParams(rng.normal(size=h_size), float(rng.normal())),
            )
            h = rng.uniform(-1.0, 1.0, size=h_size)
            c = rng.normal(scale=2.0, size=h_size)
            h_new, _, cache = lstm_step(params, float(rng.normal(scale=3.0)), h, c)
            assert np.all(np.abs(h_new) < 1.0)
            for gate in (cache.i, cache.f, cache.o):
                assert np.all(gate > 0.0) and np.all(gate < 1.0)


class TestModelForward:
    def test_zero_params_predicts_zero(self):
        params = zero_params(4)
        pred, caches = model_forward(params, np.array([1.0, -2.0, 3.0]))
        assert pred == 0.0
        assert len(caches) == 3

    def test_bias_only_model_predicts_bias(self):
        params = ModelParams(
            LstmParams(np.zeros((4, 4)), np.zeros((4, 4, 4)), np.zeros((4, 4))),
            DenseParams(np.zeros(4), 7.0),
        )
        pred, _ = model_forward(params, np.array([1.0, -2.0, 3.0]))
        assert pred == 7.0

    def test_matches_manual_step_unroll(self):
        params = init_params(2, 21)
        window = np.array([0.3, -0.8])
        h = np.zeros(2)
        c = np.zeros(2)
        for x in window:
            h, c, _ = lstm_step(params, float(x), h, c)
        expected = float(params.dense.w @ h + params.dense.b)
        pred, _ = model_forward(params, window)
        assert pred == pytest.approx(expected, rel=0, abs=1e-15)


class TestBackends:
    def test_forward_batch_matches_single_forward(self, rng_windows):
        params = init_params(6, 2)
        theta = params.flatten()
        windows, _ = rng_windows(5, 9, 7)
        preds = forward_batch(theta, 6, windows)[0]
        for n in range(9):
            single, _ = model_forward(params, windows[n])
            assert np.asarray(preds)[n] == pytest.approx(single, rel=0, abs=1e-12)

    def test_compiled_and_reference_agree(self, rng_windows):
        try:
            from notchcast import _kernels
        except ImportError:
            pytest.skip("compiled kernels not built")
        theta = init_params(8, 3).flatten()
        windows, targets = rng_windows(11, 16, 10)
        ref = _reference.forward_batch(theta, 8, windows)
        com = _kernels.forward_batch(theta, 8, windows)
        for r, c in zip(ref, com):
            np.testing.assert_allclose(np.asarray(c), r, rtol=0, atol=1e-12)
        g_ref = _reference.backward_batch(theta, 8, windows, targets, *ref)
        g_com = np.asarray(_kernels.backward_batch(
            theta, 8, windows, targets, *(np.asarray(a) for a in com)
        ))
        np.testing.assert_allclose(g_com, g_ref, rtol=1e-12, atol=1e-14)

    def test_env_var_selects_pure_backend(self):
        env = dict(os.environ, NOTCHCAST_BACKEND="pure")
        out = subprocess.run(
            [sys.executable, "-c",
             "from notchcast.backend import BACKEND; print(BACKEND)"],
            capture_output=True, text=True, env=env, check=True,
        )
        assert out.stdout.strip() == "pure"

    def test_backend_is_reported(self):
        assert BACKEND in ("pure", "compiled")

    def test_backward_zero_error_gives_zero_gradient(self, rng_windows):
        theta = init_params(3, 5).flatten()
        windows, _ = rng_windows(2, 4, 6)
        preds, gates, cells, hiddens = forward_batch(theta, 3, windows)
        grad = backward_batch(theta, 3, windows, np.asarray(preds).copy(),
                              preds, gates, cells, hiddens)
        np.testing.assert_array_equal(np.asarray(grad), np.zeros(param_count(3)))

    def test_dense_bias_gradient_analytic(self, rng_windows):
        # d(mse)/d(dense.b) = (2/N) * sum(pred - target)
        theta = init_params(4, 9).flatten()
        windows, targets = rng_windows(3, 7, 5)
        preds, gates, cells, hiddens = forward_batch(theta, 4, windows)
        grad = np.asarray(backward_batch(theta, 4, windows, targets,
                                         preds, gates, cells, hiddens))
        expected = 2.0 * np.mean(np.asarray(preds) - targets)
        assert grad[-1] == pytest.approx(expected, rel=1e-12)

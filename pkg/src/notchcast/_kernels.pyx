# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch kernels: LSTM forward over windows and exact BPTT.

Drop-in replacement for :mod:`notchcast._reference` (same signatures, same
cache layout, same parameter-vector layout); see that module for the
contract.

Where the speed comes from: the reference implementation issues dozens of
small numpy operations per time step, so on this problem size (~hundreds of
windows, a few dozen hidden units) it is dominated by per-call dispatch
overhead rather than arithmetic. Here all sequential recurrences, gate
caching, and layout shuffling are fused C loops, and each time step issues
a single large matrix product (np.matmul -> BLAS) plus a handful of whole-
buffer transcendental ufuncs. The weight-gradient contractions are hoisted
out of the time loop entirely and computed as one matrix product each at
the end of the backward pass.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def forward_batch(double[::1] theta, int hidden, double[:, ::1] windows):
    cdef int n = windows.shape[0]
    cdef int steps = windows.shape[1]
    cdef int h = hidden
    cdef int cols = 4 * h
    cdef int per_gate = 2 * h + h * h
    cdef int dense_off = 4 * per_gate

    preds_arr = np.empty(n, dtype=np.float64)
    gates_arr = np.empty((n, steps, 4, h), dtype=np.float64)
    cells_arr = np.empty((n, steps, h), dtype=np.float64)
    hiddens_arr = np.empty((n, steps, h), dtype=np.float64)
    cdef double[::1] preds = preds_arr
    cdef double[:, :, :, ::1] gates = gates_arr
    cdef double[:, :, ::1] cells = cells_arr
    cdef double[:, :, ::1] hiddens = hiddens_arr

    # one augmented matmul per step computes every gate's pre-activation:
    # [h_prev | x | 1] @ [W_h^T ; w_x ; b], with the recurrent block
    # transposed to Waug[k, gate*h + j] so all four gates share the product
    aug_arr = np.zeros((n, h + 2), dtype=np.float64)
    Waug_arr = np.empty((h + 2, cols), dtype=np.float64)
    pre_arr = np.empty((n, cols), dtype=np.float64)
    c_cur_arr = np.zeros((n, h), dtype=np.float64)
    th_arr = np.empty((n, h), dtype=np.float64)
    cdef double[:, ::1] aug = aug_arr
    cdef double[:, ::1] Waug = Waug_arr
    cdef double[:, ::1] pre = pre_arr
    cdef double[:, ::1] c_cur = c_cur_arr
    cdef double[:, ::1] th = th_arr

    cdef int sample, t, j, k, gate, base, col
    cdef double p

    for gate in range(4):
        base = gate * per_gate
        for j in range(h):
            col = gate * h + j
            Waug[h, col] = theta[base + j]              # input weight
            Waug[h + 1, col] = theta[base + h + h * h + j]  # bias
            for k in range(h):
                Waug[k, col] = theta[base + h + j * h + k]
    for sample in range(n):
        aug[sample, h + 1] = 1.0

    sig_view = pre_arr[:, :3 * h]
    tanh_view = pre_arr[:, 3 * h:]

    for t in range(steps):
        for sample in range(n):
            aug[sample, h] = windows[sample, t]
        np.matmul(aug_arr, Waug_arr, out=pre_arr)

        # sigmoid on the i, f, o blocks, tanh on the candidate block
        np.negative(sig_view, out=sig_view)
        np.exp(sig_view, out=sig_view)
        np.add(sig_view, 1.0, out=sig_view)
        np.reciprocal(sig_view, out=sig_view)
        np.tanh(tanh_view, out=tanh_view)

        for sample in range(n):
            for j in range(h):
                c_cur[sample, j] = (pre[sample, h + j] * c_cur[sample, j]
                                    + pre[sample, j] * pre[sample, 3 * h + j])
        np.tanh(c_cur_arr, out=th_arr)
        for sample in range(n):
            for j in range(h):
                gates[sample, t, 0, j] = pre[sample, j]
                gates[sample, t, 1, j] = pre[sample, h + j]
                gates[sample, t, 2, j] = pre[sample, 2 * h + j]
                gates[sample, t, 3, j] = pre[sample, 3 * h + j]
                cells[sample, t, j] = c_cur[sample, j]
                aug[sample, j] = pre[sample, 2 * h + j] * th[sample, j]
                hiddens[sample, t, j] = aug[sample, j]

    for sample in range(n):
        p = theta[dense_off + h]
        for j in range(h):
            p += theta[dense_off + j] * hiddens[sample, steps - 1, j]
        preds[sample] = p

    return preds_arr, gates_arr, cells_arr, hiddens_arr


def backward_batch(double[::1] theta, int hidden, double[:, ::1] windows,
                   double[::1] targets, double[::1] preds,
                   double[:, :, :, ::1] gates, double[:, :, ::1] cells,
                   double[:, :, ::1] hiddens):
    cdef int n = windows.shape[0]
    cdef int steps = windows.shape[1]
    cdef int h = hidden
    cdef int cols = 4 * h
    cdef int per_gate = 2 * h + h * h
    cdef int dense_off = 4 * per_gate

    grad_arr = np.zeros(theta.shape[0], dtype=np.float64)
    cdef double[::1] grad = grad_arr

    # tanh of every cached cell state in one vectorized call
    tanhc_arr = np.tanh(cells)
    cdef double[:, :, ::1] tanhc = tanhc_arr

    # W2[gate*h + j, k] = recurrent weight w_h[gate][j, k], natural rows,
    # so dh_next = da_t @ W2 is one matmul per step
    W2_arr = np.empty((cols, h), dtype=np.float64)
    cdef double[:, ::1] W2 = W2_arr

    # pre-activation gradients for every (step, sample); per-step slices
    # stay C-contiguous for the matmuls, and the whole block feeds the
    # end-of-call weight-gradient contractions
    da_arr = np.empty((steps, n, cols), dtype=np.float64)
    hp_arr = np.zeros((steps, n, h), dtype=np.float64)  # h_{t-1}, zero at t=0
    x_arr = np.empty((steps, n), dtype=np.float64)
    dh_arr = np.empty((n, h), dtype=np.float64)
    dc_arr = np.zeros((n, h), dtype=np.float64)
    cdef double[:, :, ::1] da = da_arr
    cdef double[:, :, ::1] hp = hp_arr
    cdef double[:, ::1] xs = x_arr
    cdef double[:, ::1] dh = dh_arr
    cdef double[:, ::1] dc = dc_arr

    cdef int sample, t, j, k, gate, base, col, row
    cdef double dpred, tc, i_j, f_j, o_j, g_j, c_prev_j, dcj

    for gate in range(4):
        base = gate * per_gate
        for j in range(h):
            row = base + h + j * h
            for k in range(h):
                W2[gate * h + j, k] = theta[row + k]

    for t in range(steps):
        for sample in range(n):
            xs[t, sample] = windows[sample, t]
            if t > 0:
                for k in range(h):
                    hp[t, sample, k] = hiddens[sample, t - 1, k]

    for sample in range(n):
        dpred = 2.0 * (preds[sample] - targets[sample]) / n
        grad[dense_off + h] += dpred
        for j in range(h):
            grad[dense_off + j] += dpred * hiddens[sample, steps - 1, j]
            dh[sample, j] = dpred * theta[dense_off + j]

    for t in range(steps - 1, -1, -1):
        for sample in range(n):
            for j in range(h):
                i_j = gates[sample, t, 0, j]
                f_j = gates[sample, t, 1, j]
                o_j = gates[sample, t, 2, j]
                g_j = gates[sample, t, 3, j]
                tc = tanhc[sample, t, j]
                c_prev_j = cells[sample, t - 1, j] if t > 0 else 0.0
                dcj = dc[sample, j] + dh[sample, j] * o_j * (1.0 - tc * tc)
                da[t, sample, j] = dcj * g_j * i_j * (1.0 - i_j)
                da[t, sample, h + j] = dcj * c_prev_j * f_j * (1.0 - f_j)
                da[t, sample, 2 * h + j] = dh[sample, j] * tc * o_j * (1.0 - o_j)
                da[t, sample, 3 * h + j] = dcj * i_j * (1.0 - g_j * g_j)
                dc[sample, j] = dcj * f_j
        if t > 0:
            np.matmul(da_arr[t], W2_arr, out=dh_arr)

    # weight gradients: one contraction each over all (step, sample) pairs
    da_flat = da_arr.reshape(steps * n, cols)
    g_wx = da_flat.T @ x_arr.reshape(steps * n)
    g_b = da_flat.sum(axis=0)
    g_wh = da_flat.T @ hp_arr.reshape(steps * n, h)
    cdef double[::1] g_wx_v = g_wx
    cdef double[::1] g_b_v = g_b
    cdef double[:, ::1] g_wh_v = g_wh

    for gate in range(4):
        base = gate * per_gate
        for j in range(h):
            col = gate * h + j
            grad[base + j] = g_wx_v[col]
            grad[base + h + h * h + j] = g_b_v[col]
            row = base + h + j * h
            for k in range(h):
                grad[row + k] = g_wh_v[col, k]

    return grad_arr

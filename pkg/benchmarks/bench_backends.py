#!/usr/bin/env python3
"""Time the compiled batch kernels against the pure-numpy reference.

Runs forward and forward+backward passes at the default problem size
(H=32 hidden units, W=12 lookback, N=88 training windows) plus a couple
of larger shapes, and prints the per-call time and speedup. Both
implementations are exercised in-process, so this also re-checks that
they agree numerically before timing them.

Usage::

    python3 benchmarks/bench_backends.py [--repeats 200]
"""

import argparse
import sys
import time

import numpy as np

from notchcast import _reference
from notchcast.model import init_params, param_count

try:
    from notchcast import _kernels
except ImportError:
    _kernels = None


SHAPES = (
    # (hidden, lookback, batch)
    (4, 5, 2),      # gradient-check shape: per-step dispatch overhead dominates
    (32, 12, 88),   # default training shape
    (32, 24, 256),
    (64, 12, 88),
)


def make_problem(hidden, lookback, batch, seed=7):
    rng = np.random.default_rng(seed)
    theta = init_params(hidden, seed).flatten()
    windows = rng.normal(size=(batch, lookback))
    targets = rng.normal(size=batch)
    return theta, windows, targets


def run_pass(impl, theta, hidden, windows, targets, with_backward):
    preds, gates, cells, hiddens = impl.forward_batch(theta, hidden, windows)
    if with_backward:
        impl.backward_batch(theta, hidden, windows, targets,
                            preds, gates, cells, hiddens)
    return preds


def check_agreement(theta, hidden, windows, targets):
    ref_p, *ref_rest = _reference.forward_batch(theta, hidden, windows)
    com_p, *com_rest = _kernels.forward_batch(theta, hidden, windows)
    fwd = float(np.abs(ref_p - com_p).max())
    ref_g = _reference.backward_batch(theta, hidden, windows, targets,
                                      ref_p, *ref_rest)
    com_g = _kernels.backward_batch(theta, hidden, windows, targets,
                                    com_p, *com_rest)
    bwd = float(np.abs(ref_g - com_g).max())
    return fwd, bwd


def time_call(fn, repeats):
    fn()  # warm-up
    start = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - start) / repeats


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=200,
                        help="timed iterations per measurement (default 200)")
    args = parser.parse_args(argv)

    if _kernels is None:
        print("compiled extension not built; timing the pure backend only",
              file=sys.stderr)

    header = (f"{'shape (H,W,N)':>16} {'pass':>12} {'pure (ms)':>10} "
              f"{'compiled (ms)':>14} {'speedup':>8}")
    print(header)
    print("-" * len(header))

    for hidden, lookback, batch in SHAPES:
        theta, windows, targets = make_problem(hidden, lookback, batch)
        assert theta.shape == (param_count(hidden),)

        if _kernels is not None:
            fwd_diff, bwd_diff = check_agreement(theta, hidden, windows, targets)
            assert fwd_diff < 1e-10 and bwd_diff < 1e-10, (fwd_diff, bwd_diff)

        for with_backward, label in ((False, "forward"), (True, "fwd+bwd")):
            pure = time_call(
                lambda: run_pass(_reference, theta, hidden, windows, targets,
                                 with_backward),
                args.repeats)
            if _kernels is None:
                print(f"{f'({hidden},{lookback},{batch})':>16} {label:>12} "
                      f"{pure * 1e3:>10.3f} {'n/a':>14} {'n/a':>8}")
                continue
            compiled = time_call(
                lambda: run_pass(_kernels, theta, hidden, windows, targets,
                                 with_backward),
                args.repeats)
            print(f"{f'({hidden},{lookback},{batch})':>16} {label:>12} "
                  f"{pure * 1e3:>10.3f} {compiled * 1e3:>14.3f} "
                  f"{pure / compiled:>7.2f}x")

    if _kernels is not None:
        print("\nnumerical agreement checked at 1e-10 before timing.")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

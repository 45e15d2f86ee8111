"""Shared fixtures: one default synthetic run reused across test modules."""

import numpy as np
import pytest

from notchcast.panel import build_panels
from notchcast.preprocess import build_supervised
from notchcast.synth import SynthConfig, generate_panel
from notchcast.training import TrainConfig, train


@pytest.fixture(scope="session")
def default_synth():
    """(events, ground truth) for the default generator config."""
    return generate_panel(SynthConfig())


@pytest.fixture(scope="session")
def default_panels(default_synth):
    events, _ = default_synth
    return build_panels(events)


@pytest.fixture(scope="session")
def default_datasets(default_panels):
    us, intl = default_panels
    return build_supervised(us, intl, lookback=12, train_fraction=0.8, winsor_k=4.0)


@pytest.fixture(scope="session")
def default_training_run(default_datasets):
    """Params + loss curve from training at the documented defaults."""
    train_set, test_set = default_datasets
    cfg = TrainConfig()
    params, curve = train(cfg, train_set, test_set)
    return cfg, params, curve


@pytest.fixture()
def rng_windows():
    """Factory for small random (windows, targets) batches."""

    def make(seed: int, n: int, w: int):
        rng = np.random.default_rng(seed)
        return rng.normal(size=(n, w)), rng.normal(size=n)

    return make

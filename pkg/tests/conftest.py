from __future__ import annotations

import numpy as np
import pytest

from quantdesk.synth import make_dataset


def random_ohlcv(rng: np.random.Generator, n: int) -> dict[str, np.ndarray]:
    """Valid random OHLCV arrays (positive prices, low <= o/c <= high)."""
    close = 100.0 * np.exp(np.cumsum(rng.normal(0.0, 0.01, n)))
    gaps = rng.normal(0.0, 0.004, n)
    open_ = close * (1.0 + gaps)
    spans = np.abs(rng.normal(0.0, 0.005, n)) + 1e-5
    high = np.maximum(open_, close) * (1.0 + spans)
    low = np.minimum(open_, close) * (1.0 - spans)
    volume = rng.integers(1_000, 1_000_000, n).astype(float)
    return {"open": open_, "high": high, "low": low, "close": close, "volume": volume}


@pytest.fixture(scope="session")
def synth_dataset():
    return make_dataset(seed=7)


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)

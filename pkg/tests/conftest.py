import numpy as np
import pytest

from apsel.dataset import FingerprintDataset
from apsel.synthetic import generate_synthetic


@pytest.fixture(scope="session")
def synthetic_default():
    """The bundled 20-AP benchmark dataset (5 informative, 10 copies, 5 noise)."""
    return generate_synthetic(seed=0)


@pytest.fixture()
def small_dataset():
    """Four-AP, two-floor toy set: col 0 tracks the floor, col 1 copies col 0,
    col 2 is all-sentinel, col 3 alternates independently of the floor."""
    rng = np.random.default_rng(42)
    m = 40
    floor = np.repeat(["low", "high"], m // 2)
    rng.shuffle(floor)
    level = np.where(floor == "high", -30.0, -80.0)
    col0 = level + rng.normal(0, 2.0, m)
    col1 = 0.9 * col0 - 3.0
    col2 = np.full(m, 100.0)
    col3 = rng.uniform(-100.0, -10.0, m)
    rss = np.clip(np.column_stack([col0, col1, col2, col3]), -104.0, 0.0)
    rss[:, 2] = 100.0
    return FingerprintDataset(
        rss=rss,
        floors=floor,
        ap_ids=("WAP001", "WAP002", "WAP003", "WAP004"),
    )

"""Synthetic fingerprint generator with known ground truth.

Column layout, in order:

* ``n_informative`` APs, each encoding one bit of the floor index as a
  two-level signal plus Gaussian noise. With the default floor count of
  ``2 ** n_informative`` every informative AP is necessary to tell all
  floors apart, and the bits are mutually uncorrelated.
* ``n_redundant`` APs: noisy affine copies of the informative columns
  (round-robin), so they are highly correlated with their source and
  slightly weaker predictors.
* ``n_noise`` APs: uniform draws carrying no floor information.

The generated dataset ships with balanced floor counts so stratified splits
always succeed.
"""

from __future__ import annotations

import numpy as np

from .dataset import (
    DEFAULT_RSS_MAX,
    DEFAULT_RSS_MIN,
    DEFAULT_SENTINEL,
    FingerprintDataset,
)
from .errors import ConfigError

_LOW_LEVEL = -85.0
_HIGH_LEVEL = -35.0
_SIGNAL_NOISE = 6.0
_COPY_SCALE = 0.85
_COPY_OFFSET = -4.0
_COPY_NOISE = 10.0


def generate_synthetic(
    m: int = 2000,
    n_informative: int = 5,
    n_redundant: int = 10,
    n_noise: int = 5,
    floors: int | None = None,
    seed: int = 0,
    sentinel: float = DEFAULT_SENTINEL,
    rss_min: float = DEFAULT_RSS_MIN,
    rss_max: float = DEFAULT_RSS_MAX,
) -> FingerprintDataset:
    """Build a labeled synthetic fingerprint; deterministic per seed."""
    if m < 4:
        raise ConfigError(f"need at least 4 samples, got {m}")
    if n_informative < 1:
        raise ConfigError("need at least one informative AP")
    if n_redundant < 0 or n_noise < 0:
        raise ConfigError("AP counts must be nonnegative")
    f = 2**n_informative if floors is None else int(floors)
    if f < 2:
        raise ConfigError(f"need at least 2 floors, got {f}")
    if m < 2 * f:
        raise ConfigError(f"need at least {2 * f} samples for {f} floors")

    rng = np.random.default_rng(seed)
    n = n_informative + n_redundant + n_noise

    reps = -(-m // f)
    floor_idx = np.tile(np.arange(f), reps)[:m]
    rng.shuffle(floor_idx)

    rss = np.empty((m, n), dtype=np.float64)
    span = _HIGH_LEVEL - _LOW_LEVEL
    for j in range(n_informative):
        bit = (floor_idx >> j) & 1
        rss[:, j] = _LOW_LEVEL + span * bit + rng.normal(0.0, _SIGNAL_NOISE, size=m)
    for r in range(n_redundant):
        src = r % n_informative
        rss[:, n_informative + r] = (
            _COPY_SCALE * rss[:, src] + _COPY_OFFSET + rng.normal(0.0, _COPY_NOISE, size=m)
        )
    for q in range(n_noise):
        rss[:, n_informative + n_redundant + q] = rng.uniform(rss_min, rss_max, size=m)
    np.clip(rss, rss_min, rss_max, out=rss)

    return FingerprintDataset(
        rss=rss,
        floors=floor_idx.astype(str),
        ap_ids=tuple(f"WAP{i + 1:03d}" for i in range(n)),
        sentinel=sentinel,
        rss_min=rss_min,
        rss_max=rss_max,
    )


def informative_indices(n_informative: int = 5) -> np.ndarray:
    """Column indices of the ground-truth informative APs."""
    return np.arange(n_informative)

"""RSS fingerprint datasets: ingestion, validation, binning, splitting.

The canonical on-disk form is a headered CSV whose RSS columns share a common
prefix (default ``WAP``), followed by a categorical floor column. A reserved
sentinel value (default 100) marks "AP not detected"; every other reading must
lie inside the declared dBm range.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import ConfigError, DataError

DEFAULT_SENTINEL = 100.0
DEFAULT_RSS_MIN = -104.0
DEFAULT_RSS_MAX = 0.0
DEFAULT_BINS = 10
DEFAULT_TEST_FRACTION = 0.3
DEFAULT_SPLIT_SEED = 7


@dataclass(frozen=True)
class CsvSchema:
    """Where to find things in a fingerprint CSV.

    RSS columns are located either by a shared header prefix or by an explicit
    half-open range of header positions (``rss_columns`` wins when both are
    set). ``sentinel`` is the not-detected marker; detected readings must lie
    in ``[rss_min, rss_max]``.
    """

    rss_prefix: str | None = "WAP"
    rss_columns: tuple[int, int] | None = None
    floor_column: str = "FLOOR"
    sentinel: float = DEFAULT_SENTINEL
    rss_min: float = DEFAULT_RSS_MIN
    rss_max: float = DEFAULT_RSS_MAX

    def __post_init__(self) -> None:
        if self.rss_min >= self.rss_max:
            raise ConfigError(
                f"rss_min must be below rss_max, got [{self.rss_min}, {self.rss_max}]"
            )
        if self.rss_prefix is None and self.rss_columns is None:
            raise ConfigError("schema needs an RSS column prefix or an explicit column range")


@dataclass(frozen=True, eq=False)
class FingerprintDataset:
    """An m x n RSS matrix with one categorical floor label per row.

    Immutable after construction; the arrays are marked read-only so instances
    are safe to share across threads.
    """

    rss: np.ndarray
    floors: np.ndarray
    ap_ids: tuple[str, ...]
    sentinel: float = DEFAULT_SENTINEL
    rss_min: float = DEFAULT_RSS_MIN
    rss_max: float = DEFAULT_RSS_MAX

    def __post_init__(self) -> None:
        rss = np.ascontiguousarray(np.asarray(self.rss, dtype=np.float64))
        floors = np.asarray([str(v) for v in np.asarray(self.floors).ravel()])
        ap_ids = tuple(str(a) for a in self.ap_ids)
        if rss.ndim != 2:
            raise DataError(f"rss must be a 2-D matrix, got shape {rss.shape}")
        m, n = rss.shape
        if m < 1 or n < 1:
            raise DataError(f"dataset needs at least one row and one column, got {m}x{n}")
        if floors.shape != (m,):
            raise DataError(f"floor labels must have length {m}, got {floors.shape}")
        if len(ap_ids) != n:
            raise DataError(f"expected {n} AP ids, got {len(ap_ids)}")
        if len(set(ap_ids)) != n:
            raise DataError("AP ids must be unique")
        if self.rss_min >= self.rss_max:
            raise DataError(f"invalid RSS range [{self.rss_min}, {self.rss_max}]")
        if np.isnan(rss).any():
            raise DataError("rss contains NaN values")
        detected = rss != self.sentinel
        vals = rss[detected]
        if vals.size and (vals.min() < self.rss_min or vals.max() > self.rss_max):
            raise DataError(
                "detected RSS values fall outside the declared range "
                f"[{self.rss_min}, {self.rss_max}]: observed "
                f"[{vals.min()}, {vals.max()}]"
            )
        if np.unique(floors).size < 2:
            raise DataError("fewer than 2 distinct floor labels")
        rss.setflags(write=False)
        floors.setflags(write=False)
        object.__setattr__(self, "rss", rss)
        object.__setattr__(self, "floors", floors)
        object.__setattr__(self, "ap_ids", ap_ids)

    @property
    def m(self) -> int:
        return self.rss.shape[0]

    @property
    def n(self) -> int:
        return self.rss.shape[1]

    @property
    def floor_labels(self) -> tuple[str, ...]:
        return tuple(np.unique(self.floors))

    @property
    def f(self) -> int:
        return len(self.floor_labels)

    def filled_rss(self) -> np.ndarray:
        """RSS matrix with the sentinel replaced by one unit below the range.

        Non-detection then behaves as the weakest possible signal, which keeps
        correlation and distance computations from being dominated by the
        (typically large positive) sentinel value.
        """
        filled = self.rss.copy()
        filled[filled == self.sentinel] = self.rss_min - 1.0
        return filled

    def summary(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "f": self.f,
            "sentinel": self.sentinel,
            "rss_min": self.rss_min,
            "rss_max": self.rss_max,
        }

    def equals(self, other: "FingerprintDataset") -> bool:
        return (
            self.ap_ids == other.ap_ids
            and self.sentinel == other.sentinel
            and self.rss_min == other.rss_min
            and self.rss_max == other.rss_max
            and np.array_equal(self.rss, other.rss)
            and np.array_equal(self.floors, other.floors)
        )


@dataclass(frozen=True, eq=False)
class DiscretizedDataset:
    """Binned view of a fingerprint: small-integer bin indices per cell.

    Bin ``b - 1`` is reserved for "not detected"; indices ``0 .. b-2`` cover
    the declared RSS range in equal widths.
    """

    bins: np.ndarray
    b: int
    floors: np.ndarray
    ap_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        bins = np.ascontiguousarray(np.asarray(self.bins, dtype=np.int16))
        if self.b < 2:
            raise ConfigError(f"bin count must be at least 2, got {self.b}")
        if bins.min() < 0 or bins.max() >= self.b:
            raise DataError(f"bin indices must lie in [0, {self.b})")
        bins.setflags(write=False)
        object.__setattr__(self, "bins", bins)

    @property
    def m(self) -> int:
        return self.bins.shape[0]

    @property
    def n(self) -> int:
        return self.bins.shape[1]

    @property
    def f(self) -> int:
        return np.unique(self.floors).size


def load_fingerprint(path: str, schema: CsvSchema | None = None) -> FingerprintDataset:
    """Read and validate a fingerprint CSV.

    Raises DataError for a missing file, missing declared columns, any
    non-numeric RSS cell (reported with its 0-based data row index), or fewer
    than 2 distinct floor labels.
    """
    schema = schema or CsvSchema()
    if not os.path.isfile(path):
        raise DataError(f"no such file: {path}")
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except Exception as exc:
        raise DataError(f"cannot parse CSV {path}: {exc}") from exc
    columns = list(frame.columns)
    if schema.floor_column not in columns:
        raise DataError(f"missing floor column {schema.floor_column!r}")
    if schema.rss_columns is not None:
        start, stop = schema.rss_columns
        if not (0 <= start < stop <= len(columns)):
            raise DataError(
                f"RSS column range [{start}, {stop}) is outside the {len(columns)} header columns"
            )
        rss_cols = columns[start:stop]
    else:
        rss_cols = [c for c in columns if c.startswith(schema.rss_prefix)]
    rss_cols = [c for c in rss_cols if c != schema.floor_column]
    if not rss_cols:
        raise DataError("no RSS columns matched the schema")

    raw = frame[rss_cols].apply(pd.to_numeric, errors="coerce")
    bad_rows = np.flatnonzero(raw.isna().any(axis=1).to_numpy())
    if bad_rows.size:
        shown = ", ".join(str(r) for r in bad_rows[:5])
        more = "" if bad_rows.size <= 5 else f" (+{bad_rows.size - 5} more)"
        raise DataError(f"non-numeric RSS cell(s) in data row(s) {shown}{more}")
    floors = frame[schema.floor_column]
    if floors.isna().any():
        bad = int(np.flatnonzero(floors.isna().to_numpy())[0])
        raise DataError(f"missing floor label in data row {bad}")

    return FingerprintDataset(
        rss=raw.to_numpy(dtype=np.float64),
        floors=floors.astype(str).to_numpy(),
        ap_ids=tuple(rss_cols),
        sentinel=schema.sentinel,
        rss_min=schema.rss_min,
        rss_max=schema.rss_max,
    )


def save_fingerprint(d: FingerprintDataset, path: str, floor_column: str = "FLOOR") -> str:
    """Write the canonical CSV form (RSS columns first, floor column last).

    Float cells are written with full repr precision so that reloading yields
    a bit-identical dataset.
    """
    frame = pd.DataFrame(np.asarray(d.rss), columns=list(d.ap_ids))
    frame[floor_column] = d.floors
    frame.to_csv(path, index=False, lineterminator="\r\n")
    return path


def discretize(d: FingerprintDataset, b: int = DEFAULT_BINS) -> DiscretizedDataset:
    """Equal-width binning over the declared RSS range plus a not-detected bin.

    Detected values map monotonically onto indices ``0 .. b-2``; the sentinel
    maps to ``b - 1``. Deterministic, so re-running yields identical bins.
    """
    if b < 2:
        raise ConfigError(f"bin count must be at least 2, got {b}")
    width = (d.rss_max - d.rss_min) / (b - 1)
    scaled = np.floor((d.rss - d.rss_min) / width).astype(np.int16)
    np.clip(scaled, 0, b - 2, out=scaled)
    bins = np.where(d.rss == d.sentinel, np.int16(b - 1), scaled)
    return DiscretizedDataset(bins=bins, b=b, floors=d.floors, ap_ids=d.ap_ids)


def _take_rows(d: FingerprintDataset, idx: np.ndarray) -> FingerprintDataset:
    return FingerprintDataset(
        rss=d.rss[idx],
        floors=d.floors[idx],
        ap_ids=d.ap_ids,
        sentinel=d.sentinel,
        rss_min=d.rss_min,
        rss_max=d.rss_max,
    )


def split(
    d: FingerprintDataset,
    test_fraction: float = DEFAULT_TEST_FRACTION,
    seed: int = DEFAULT_SPLIT_SEED,
) -> tuple[FingerprintDataset, FingerprintDataset]:
    """Stratified train/test split, deterministic for a fixed seed.

    Every floor contributes round(test_fraction * count) rows to the test
    side, clamped so both sides keep at least one row per floor.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ConfigError(f"test_fraction must be in (0, 1), got {test_fraction}")
    rng = np.random.default_rng(seed)
    test_parts = []
    for label in d.floor_labels:
        idx = np.flatnonzero(d.floors == label)
        if idx.size < 2:
            raise DataError(
                f"floor {label!r} has only {idx.size} sample(s); cannot stratify"
            )
        n_test = int(round(test_fraction * idx.size))
        n_test = min(max(n_test, 1), idx.size - 1)
        perm = rng.permutation(idx.size)
        test_parts.append(idx[perm[:n_test]])
    test_idx = np.sort(np.concatenate(test_parts))
    mask = np.zeros(d.m, dtype=bool)
    mask[test_idx] = True
    train_idx = np.flatnonzero(~mask)
    return _take_rows(d, train_idx), _take_rows(d, test_idx)


def reduce(d: FingerprintDataset, x) -> FingerprintDataset:
    """Project onto the APs selected by the binary vector x (column subset)."""
    x = np.asarray(x)
    if x.shape != (d.n,):
        raise ValueError(f"selection vector must have length {d.n}, got shape {x.shape}")
    xi = x.astype(np.int64)
    if not np.isin(xi, (0, 1)).all():
        raise ValueError("selection vector must be binary")
    keep = np.flatnonzero(xi == 1)
    if keep.size == 0:
        raise DataError("empty selection: a fingerprint with no APs is unusable")
    return FingerprintDataset(
        rss=d.rss[:, keep],
        floors=d.floors,
        ap_ids=tuple(d.ap_ids[i] for i in keep),
        sentinel=d.sentinel,
        rss_min=d.rss_min,
        rss_max=d.rss_max,
    )

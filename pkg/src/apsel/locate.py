"""Floor localization: the accuracy oracle behind the alpha search.

Two classifiers are available. The default is a hand-rolled k-nearest-
neighbors matcher over sentinel-substituted RSS (the field-standard
fingerprint method) because it is fully deterministic: equal distances are
broken by the smaller training-row index, and vote ties by the nearest tied
neighbor. A seeded random forest (scikit-learn) is provided as the
alternative model family.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dataset as ds
from .errors import ConfigError, LocalizerError

_KNN_CHUNK = 256


@dataclass(frozen=True)
class ClassifierSpec:
    """Which classifier to train and with what hyperparameters."""

    kind: str = "knn"
    k_neighbors: int = 3
    trees: int = 100
    max_depth: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("knn", "forest"):
            raise ConfigError(f"classifier kind must be 'knn' or 'forest', got {self.kind!r}")
        if self.k_neighbors < 1:
            raise ConfigError(f"k_neighbors must be at least 1, got {self.k_neighbors}")
        if self.trees < 1:
            raise ConfigError(f"tree count must be at least 1, got {self.trees}")


@dataclass(frozen=True, eq=False)
class AccuracyReport:
    """Held-out evaluation: overall accuracy, per-floor breakdown, confusion."""

    accuracy: float
    per_floor: dict
    confusion: np.ndarray
    labels: tuple[str, ...]
    n_aps_used: int

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "per_floor": dict(self.per_floor),
            "labels": list(self.labels),
            "confusion": self.confusion.astype(int).tolist(),
            "n_aps_used": self.n_aps_used,
        }


class KnnClassifier:
    """Euclidean nearest-neighbor floor matcher with deterministic ties."""

    def __init__(self, features: np.ndarray, floors: np.ndarray, ap_ids: tuple, k: int):
        self._features = features
        self._floors = floors
        self._sq = (features * features).sum(axis=1)
        self.ap_ids = tuple(ap_ids)
        self.floor_labels = tuple(np.unique(floors))
        self.k = min(k, features.shape[0])

    def predict(self, features: np.ndarray) -> np.ndarray:
        out = np.empty(features.shape[0], dtype=self._floors.dtype)
        for lo in range(0, features.shape[0], _KNN_CHUNK):
            chunk = features[lo : lo + _KNN_CHUNK]
            d2 = (chunk * chunk).sum(axis=1)[:, None] + self._sq[None, :] - 2.0 * (
                chunk @ self._features.T
            )
            np.maximum(d2, 0.0, out=d2)
            # stable sort keeps the smaller training index first on exact ties
            nearest = np.argsort(d2, axis=1, kind="stable")[:, : self.k]
            for r in range(nearest.shape[0]):
                out[lo + r] = self._vote(self._floors[nearest[r]])
        return out

    @staticmethod
    def _vote(labels: np.ndarray) -> str:
        counts: dict = {}
        for lab in labels:
            counts[lab] = counts.get(lab, 0) + 1
        best_lab = labels[0]
        best_cnt = 0
        for lab in labels:  # nearest-first order: first label to reach the max wins
            if counts[lab] > best_cnt:
                best_lab, best_cnt = lab, counts[lab]
        return best_lab


class ForestClassifier:
    """Seeded random-forest floor classifier (scikit-learn backed)."""

    def __init__(self, features: np.ndarray, floors: np.ndarray, ap_ids: tuple, spec: ClassifierSpec):
        from sklearn.ensemble import RandomForestClassifier

        self.ap_ids = tuple(ap_ids)
        self.floor_labels = tuple(np.unique(floors))
        self._model = RandomForestClassifier(
            n_estimators=spec.trees,
            max_depth=spec.max_depth,
            max_features="sqrt",
            bootstrap=True,
            random_state=spec.seed,
            n_jobs=1,
        )
        self._model.fit(features, floors)

    def predict(self, features: np.ndarray) -> np.ndarray:
        return self._model.predict(features)


def train(spec: ClassifierSpec, train_set: ds.FingerprintDataset):
    """Fit the configured classifier on sentinel-substituted RSS features."""
    if train_set.f < 2:
        raise LocalizerError("training set has a single floor label")
    features = train_set.filled_rss()
    if spec.kind == "knn":
        return KnnClassifier(features, train_set.floors, train_set.ap_ids, spec.k_neighbors)
    return ForestClassifier(features, train_set.floors, train_set.ap_ids, spec)


def evaluate(clf, test_set: ds.FingerprintDataset) -> AccuracyReport:
    """Accuracy, per-floor accuracy, and the confusion matrix on held-out rows."""
    if tuple(test_set.ap_ids) != tuple(clf.ap_ids):
        raise LocalizerError(
            f"column mismatch: classifier was trained on {len(clf.ap_ids)} APs, "
            f"test set has {len(test_set.ap_ids)}"
        )
    preds = clf.predict(test_set.filled_rss())
    labels = tuple(sorted(set(clf.floor_labels) | set(test_set.floor_labels)))
    index = {lab: i for i, lab in enumerate(labels)}
    confusion = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for truth, pred in zip(test_set.floors, preds):
        confusion[index[truth], index[pred]] += 1
    total = int(confusion.sum())
    accuracy = float(np.trace(confusion)) / total
    per_floor = {}
    for lab in labels:
        row = confusion[index[lab]]
        row_total = int(row.sum())
        if row_total:
            per_floor[lab] = float(row[index[lab]]) / row_total
    return AccuracyReport(
        accuracy=accuracy,
        per_floor=per_floor,
        confusion=confusion,
        labels=labels,
        n_aps_used=test_set.n,
    )


def accuracy_for_selection(
    x,
    train_set: ds.FingerprintDataset,
    test_set: ds.FingerprintDataset,
    spec: ClassifierSpec,
) -> float:
    """Overall floor accuracy after projecting both splits onto selection x."""
    x = np.asarray(x)
    if x.sum() < 1:
        raise LocalizerError("empty selection: cannot localize with zero APs")
    if int(x.sum()) == x.shape[0]:
        reduced_train, reduced_test = train_set, test_set
    else:
        reduced_train = ds.reduce(train_set, x)
        reduced_test = ds.reduce(test_set, x)
    clf = train(spec, reduced_train)
    return evaluate(clf, reduced_test).accuracy


def make_localizer(train_set: ds.FingerprintDataset, test_set: ds.FingerprintDataset, spec: ClassifierSpec):
    """Bind datasets and classifier spec into the accuracy callable used by search."""

    def localizer(x) -> float:
        return accuracy_for_selection(x, train_set, test_set, spec)

    return localizer

"""Labeled tabular data from CSV files and the mixing experiment on real features."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .config import ExperimentConfig
from .errors import ConfigError, DataError
from .simulate.pipeline import LabeledMatrix, fit_generator, prune, sample_synthetic, train_ridge
from .simulate.rng import stream

DEFAULT_TEST_FRACTION = 0.2


@dataclass(frozen=True)
class TabularDataset:
    """Standardized features (``p x k``, one sample per column) with +-1 labels.

    ``raw = features * feature_scales[:, None] + feature_means[:, None]``.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_means: np.ndarray
    feature_scales: np.ndarray
    label_values: tuple[str, str] = ("-1", "+1")
    feature_names: tuple[str, ...] = ()

    @property
    def dim(self) -> int:
        return self.features.shape[0]

    def __len__(self) -> int:
        return self.features.shape[1]

    def raw_features(self) -> np.ndarray:
        return self.features * self.feature_scales[:, None] + self.feature_means[:, None]


def standardization(raw: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row means and standard deviations of ``raw``; constant rows get scale 1."""
    means = raw.mean(axis=1)
    scales = raw.std(axis=1)
    scales[scales == 0] = 1.0
    return means, scales


def from_arrays(raw: np.ndarray, labels: np.ndarray, label_values=("-1", "+1"),
                feature_names: Sequence[str] = ()) -> TabularDataset:
    """Standardize a ``p x k`` raw feature matrix."""
    raw = np.asarray(raw, dtype=float)
    labels = np.asarray(labels, dtype=np.int64)
    if raw.ndim != 2 or labels.shape != (raw.shape[1],):
        raise DataError(f"features {raw.shape} and labels {labels.shape} do not match")
    if not np.all(np.isin(labels, (-1, 1))):
        raise DataError("labels must be -1 or +1")
    means, scales = standardization(raw)
    feats = (raw - means[:, None]) / scales[:, None]
    return TabularDataset(feats, labels, means, scales, tuple(label_values), tuple(feature_names))


def _resolve_label_column(header: list[str], label_column: str | int) -> int:
    if isinstance(label_column, int):
        idx = label_column
    elif label_column in header:
        return header.index(label_column)
    elif label_column.lstrip("-").isdigit():
        idx = int(label_column)
    else:
        raise DataError(f"label column {label_column!r} not found in header")
    if not -len(header) <= idx < len(header):
        raise DataError(f"label column index {idx} out of range for {len(header)} columns")
    return idx % len(header)


def load_csv(path: str | Path, label_column: str | int, positive_label: str | None = None
             ) -> TabularDataset:
    """Read a numeric CSV with a header row.

    The two label values are mapped to -1 and +1 in lexicographic order,
    unless ``positive_label`` names the value that should become +1.
    Features are standardized per column.

    Raises
    ------
    DataError
        On ragged rows, non-numeric feature cells or a label column with
        other than two distinct values.
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    rows = [r for r in rows if r]
    if len(rows) < 2:
        raise DataError(f"{path}: need a header and at least one data row")
    header, body = rows[0], rows[1:]
    width = len(header)
    lab = _resolve_label_column(header, label_column)

    raw_labels = []
    values = []
    for lineno, row in enumerate(body, start=2):
        if len(row) != width:
            raise DataError(f"{path}:{lineno}: expected {width} fields, got {len(row)}")
        raw_labels.append(row[lab].strip())
        try:
            values.append([float(v) for j, v in enumerate(row) if j != lab])
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: non-numeric feature ({exc})") from None

    distinct = sorted(set(raw_labels))
    if len(distinct) != 2:
        raise DataError(f"label column must hold exactly two values, found {len(distinct)}: {distinct[:5]}")
    if positive_label is not None:
        if positive_label not in distinct:
            raise DataError(f"positive label {positive_label!r} not among {distinct}")
        neg = distinct[0] if distinct[1] == positive_label else distinct[1]
        distinct = [neg, positive_label]
    y = np.where(np.array(raw_labels) == distinct[1], 1, -1)

    raw = np.array(values, dtype=float).T
    if not np.all(np.isfinite(raw)):
        raise DataError(f"{path}: non-finite feature values")
    names = tuple(h for j, h in enumerate(header) if j != lab)
    return from_arrays(raw, y, (distinct[0], distinct[1]), names)


def estimate_mu_norm(data: TabularDataset) -> float:
    """Norm of the empirical class-mean estimator ``(1/k) sum y_i x_i``."""
    if len(np.unique(data.labels)) < 2:
        raise DataError("need samples from both classes")
    return float(np.linalg.norm(data.features @ data.labels / len(data)))


@dataclass(frozen=True)
class MixingRecord:
    trial: int
    proportion: float
    m: int
    kept: int
    accuracy: float


def synthetic_count(n: int, proportion: float) -> int:
    """``m`` such that ``m/(n+m)`` is closest to ``proportion``."""
    if not 0.0 <= proportion < 1.0:
        raise ConfigError(f"synthetic proportion must lie in [0, 1), got {proportion}", "proportion")
    return int(round(n * proportion / (1.0 - proportion)))


def split_indices(k: int, test_fraction: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Seeded permutation split into (train, test)."""
    if not 0.0 < test_fraction < 1.0:
        raise ConfigError(f"must lie in (0, 1), got {test_fraction}", "test_fraction")
    perm = rng.permutation(k)
    n_test = max(1, int(math.floor(test_fraction * k)))
    return np.sort(perm[n_test:]), np.sort(perm[:n_test])


def real_data_mixing_run(data: TabularDataset, cfg: ExperimentConfig, trials: int,
                         proportions: Sequence[float] = (0.0,),
                         test_fraction: float = DEFAULT_TEST_FRACTION) -> list[MixingRecord]:
    """Accuracy on held-out real rows for classifiers trained on real + pruned synthetic data.

    For every trial the rows are split, standardized with training-split
    statistics, the generator is fitted on the first ``cfg.n_hat`` training
    rows, and for each proportion ``m`` synthetic samples are generated,
    label-flipped and pruned before training ridge on the first ``cfg.n``
    training rows plus the synthetic block. ``cfg.p``, ``cfg.m`` and
    ``cfg.mu_norm`` are not used.
    """
    if trials < 1:
        raise ConfigError("must be >= 1", "trials")
    raw = data.raw_features()
    k = len(data)
    records: list[MixingRecord] = []
    for t in range(trials):
        train, test = split_indices(k, test_fraction, stream(cfg.seed, "split", t))
        need = max(cfg.n, cfg.n_hat)
        if train.size < need:
            raise DataError(f"training split has {train.size} rows, need {need} (n={cfg.n}, n_hat={cfg.n_hat})")
        means, scales = standardization(raw[:, train])
        X = (raw - means[:, None]) / scales[:, None]
        y = data.labels
        real = LabeledMatrix(X[:, train[: cfg.n]], y[train[: cfg.n]])
        gen_rows = train[: cfg.n_hat]
        gen = fit_generator(LabeledMatrix(X[:, gen_rows], y[gen_rows]))
        X_test, y_test = X[:, test], y[test]
        for j, prop in enumerate(proportions):
            m = synthetic_count(cfg.n, prop)
            syn = None
            kept = 0
            if m > 0:
                syn = sample_synthetic(m, gen, cfg.epsilon, stream(cfg.seed, "synthetic", t, j))
                syn = prune(syn, cfg.rho, cfg.phi, stream(cfg.seed, "prune", t, j))
                kept = int(syn.keep_mask.sum())
            if cfg.n + m == 0:
                raise ConfigError("no training data at this proportion", "n")
            model = train_ridge(real, syn, cfg.gamma)
            scores = model.weights @ X_test
            pred = np.where(scores >= 0, 1, -1)
            records.append(MixingRecord(t, float(prop), m, kept, float(np.mean(pred == y_test))))
    return records

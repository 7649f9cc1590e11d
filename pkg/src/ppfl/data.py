"""Datasets: synthetic Gaussian mixtures, pixel CSV loading, non-IID splits."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .crypto import Stream, seeded_rng
from .errors import InputError, ParseError


class EmptyShardWarning(UserWarning):
    """A Dirichlet split left at least one client without examples."""


@dataclass
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    num_classes: int

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise InputError("features must be a 2-D matrix")
        if self.features.shape[0] != self.labels.shape[0]:
            raise InputError(
                f"{self.features.shape[0]} feature rows but {self.labels.shape[0]} labels"
            )
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.num_classes):
            raise InputError(f"labels must lie in [0, {self.num_classes})")

    def __len__(self):
        return int(self.labels.shape[0])

    @property
    def input_dim(self):
        return int(self.features.shape[1])

    def subset(self, index):
        index = np.asarray(index, dtype=np.int64)
        return Dataset(self.features[index], self.labels[index], self.num_classes)

    def class_counts(self):
        return np.bincount(self.labels, minlength=self.num_classes)


def generate_synthetic(num_examples, input_dim, num_classes, seed, separation=1.0, spread=1.0):
    """Gaussian mixture with one isotropic component per class.

    Class centres are drawn from ``N(0, separation^2 I)`` and examples from
    ``N(centre, spread^2 I)``. Labels are sampled uniformly. With the defaults
    and ``input_dim >= 10`` the classes are close to linearly separable.
    """
    if min(num_examples, input_dim, num_classes) < 1:
        raise InputError("num_examples, input_dim and num_classes must all be >= 1")
    rng = seeded_rng(seed, Stream.DATA)
    centres = rng.normal(0.0, separation, size=(num_classes, input_dim))
    labels = rng.integers(0, num_classes, size=num_examples)
    features = centres[labels] + rng.normal(0.0, spread, size=(num_examples, input_dim))
    return Dataset(features, labels, max(num_classes, 2))


def _is_int(text):
    try:
        int(text)
    except ValueError:
        return False
    return True


def load_csv_dataset(path, num_classes=None):
    """Load ``label,pixel,pixel,...`` rows, scaling pixels from bytes to [0, 1].

    A first line whose leading field is not an integer is treated as a header.
    Errors name the 1-based line number of the offending row.
    """
    labels, rows, width = [], [], None
    with open(path, newline="") as fh:
        for lineno, record in enumerate(csv.reader(fh), start=1):
            if not record or all(not f.strip() for f in record):
                continue
            if lineno == 1 and not _is_int(record[0].strip()):
                continue
            if len(record) < 2:
                raise ParseError("expected a label and at least one pixel", lineno)
            if width is None:
                width = len(record)
            elif len(record) != width:
                raise ParseError(f"expected {width} fields, found {len(record)}", lineno)
            try:
                values = [int(f) for f in record]
            except ValueError:
                raise ParseError("non-numeric field", lineno) from None
            if values[0] < 0:
                raise ParseError(f"negative label {values[0]}", lineno)
            if any(v < 0 or v > 255 for v in values[1:]):
                raise ParseError("pixel value outside 0-255", lineno)
            labels.append(values[0])
            rows.append(values[1:])
    if not rows:
        raise ParseError(f"{path}: no data rows")
    labels = np.array(labels, dtype=np.int64)
    if num_classes is None:
        num_classes = max(int(labels.max()) + 1, 2)
    elif labels.max() >= num_classes:
        raise ParseError(f"label {int(labels.max())} >= num_classes {num_classes}")
    features = np.array(rows, dtype=np.float64) / 255.0
    return Dataset(features, labels, num_classes)


def dirichlet_partition(data, num_clients, alpha, seed):
    """Split ``data`` across clients with per-class Dirichlet(alpha) proportions.

    Every example lands in exactly one shard, and shards keep the original
    row order, so ``num_clients == 1`` returns the input unchanged. Small
    ``alpha`` gives skewed shards; empty shards are allowed and reported via
    :class:`EmptyShardWarning`.
    """
    if num_clients < 1:
        raise InputError("num_clients must be >= 1")
    if not alpha > 0:
        raise InputError("alpha must be positive")
    if num_clients == 1:
        return [data.subset(np.arange(len(data)))]

    rng = seeded_rng(seed, Stream.PARTITION)
    buckets = [[] for _ in range(num_clients)]
    for c in range(data.num_classes):
        idx = np.flatnonzero(data.labels == c)
        rng.shuffle(idx)
        props = rng.dirichlet(np.full(num_clients, float(alpha)))
        if not np.all(np.isfinite(props)) or props.sum() <= 0:
            # tiny alpha can underflow every gamma draw; fall back to one owner
            props = np.zeros(num_clients)
            props[rng.integers(num_clients)] = 1.0
        cuts = np.floor(np.cumsum(props)[:-1] * idx.size).astype(np.int64)
        for k, part in enumerate(np.split(idx, cuts)):
            buckets[k].append(part)

    shards = [
        data.subset(np.sort(np.concatenate(parts)) if parts else np.array([], dtype=np.int64))
        for parts in buckets
    ]
    empty = [k for k, s in enumerate(shards) if len(s) == 0]
    if empty:
        warnings.warn(f"clients {empty} received empty shards", EmptyShardWarning, stacklevel=2)
    return shards


def train_test_split(data, test_fraction, rng):
    """Random split; returns ``(train, test)``."""
    n = len(data)
    order = rng.permutation(n)
    n_test = int(round(n * test_fraction))
    test_idx = np.sort(order[:n_test])
    train_idx = np.sort(order[n_test:])
    return data.subset(train_idx), data.subset(test_idx)

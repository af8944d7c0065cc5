"""Pair-counting agreement between two partitions: RI and ARI."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, ShapeError

__all__ = [
    "ContingencyTable",
    "ClusteringScore",
    "contingency",
    "adjusted_rand_index",
    "rand_index",
    "score",
    "ari",
]


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    counts: np.ndarray

    @property
    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class ClusteringScore:
    ari: float
    ri: float


def _dense(labels):
    # small non-negative integer labels index directly; anything else goes through unique
    if labels.dtype.kind in "iub" and labels.size and labels.min() >= 0 \
            and labels.max() < 4 * labels.size:
        present = np.bincount(labels)
        if np.all(present > 0):
            return labels.astype(np.int64), present.size
    _, inverse = np.unique(labels, return_inverse=True)
    return inverse.astype(np.int64).ravel(), int(inverse.max()) + 1


def contingency(labels_a, labels_b) -> ContingencyTable:
    """Co-occurrence counts ``n_ij``; labels may be any hashable integers."""
    a = np.asarray(labels_a).ravel()
    b = np.asarray(labels_b).ravel()
    if a.shape != b.shape:
        raise ShapeError(f"label vectors differ in length: {a.size} vs {b.size}")
    if a.size < 2:
        raise InsufficientDataError("need at least 2 labelled items")
    ia, ka = _dense(a)
    ib, kb = _dense(b)
    counts = np.bincount(ia * kb + ib, minlength=ka * kb).reshape(ka, kb)
    return ContingencyTable(counts)


def _pairs(m):
    # float64 is exact for m(m-1)/2 up to m ~ 9e7, far beyond any archive dataset
    m = np.asarray(m, dtype=np.float64)
    return m * (m - 1.0) / 2.0


def _as_table(table_or_a, b=None) -> ContingencyTable:
    if b is not None:
        return contingency(table_or_a, b)
    return table_or_a


def _same_partition(table: ContingencyTable) -> bool:
    nz = table.counts > 0
    return bool(np.all(nz.sum(axis=0) == 1) and np.all(nz.sum(axis=1) == 1))


def adjusted_rand_index(table, labels_b=None) -> float:
    """Hubert-Arabie ARI.

    Accepts a :class:`ContingencyTable` or two label vectors. When the
    expected index equals its maximum (both partitions trivial) the result
    is 1 for identical partitions and 0 otherwise.
    """
    table = _as_table(table, labels_b)
    if table.total < 2:
        raise InsufficientDataError("need at least 2 labelled items")
    index = _pairs(table.counts).sum()
    sum_a = _pairs(table.row_sums).sum()
    sum_b = _pairs(table.col_sums).sum()
    expected = sum_a * sum_b / _pairs(table.total)
    maximum = 0.5 * (sum_a + sum_b)
    if maximum == expected:
        return 1.0 if _same_partition(table) else 0.0
    return float((index - expected) / (maximum - expected))


def rand_index(table, labels_b=None) -> float:
    """Fraction of item pairs on which the two partitions agree."""
    table = _as_table(table, labels_b)
    if table.total < 2:
        raise InsufficientDataError("need at least 2 labelled items")
    total = _pairs(table.total)
    index = _pairs(table.counts).sum()
    sum_a = _pairs(table.row_sums).sum()
    sum_b = _pairs(table.col_sums).sum()
    return float((total + 2.0 * index - sum_a - sum_b) / total)


def score(labels_a, labels_b) -> ClusteringScore:
    table = contingency(labels_a, labels_b)
    return ClusteringScore(adjusted_rand_index(table), rand_index(table))


def ari(labels_a, labels_b) -> float:
    return adjusted_rand_index(contingency(labels_a, labels_b))

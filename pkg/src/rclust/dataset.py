"""Container for an equal-length univariate time-series dataset."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParseError, ShapeError


@dataclass(frozen=True, eq=False)
class TimeSeriesDataset:
    """``n_series x length`` matrix of finite values with optional labels.

    Labels, when present, are dense integers ``0..C-1``.
    """

    name: str
    values: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        values = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if values.ndim != 2:
            raise ShapeError(f"dataset values must be 2-D, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ParseError("dataset contains NaN or Inf values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int64)
            if labels.shape != (values.shape[0],):
                raise ShapeError(
                    f"{labels.shape[0]} labels for {values.shape[0]} series")
            labels.setflags(write=False)
            object.__setattr__(self, "labels", labels)

    @property
    def n_series(self) -> int:
        return self.values.shape[0]

    @property
    def length(self) -> int:
        return self.values.shape[1]

    @property
    def n_classes(self) -> int | None:
        if self.labels is None:
            return None
        return int(np.unique(self.labels).size)

    def __len__(self):
        return self.n_series


def as_dataset(data, name="array") -> TimeSeriesDataset:
    if isinstance(data, TimeSeriesDataset):
        return data
    return TimeSeriesDataset(name, np.atleast_2d(np.asarray(data, dtype=np.float64)))

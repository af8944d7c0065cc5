"""Dilated convolution and PPV pooling over a feature bank."""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from . import _kernels
from .dataset import TimeSeriesDataset, as_dataset
from .errors import DatasetTooShortError, DomainError, ShapeError
from .kernelbank import FeatureBank

__all__ = [
    "TimeSeriesDataset",
    "FeatureMatrix",
    "dilated_convolve",
    "ppv",
    "transform_dataset",
    "set_threads",
]


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """PPV features, one row per series and one column per bank feature."""

    values: np.ndarray
    bank_fingerprint: str

    @property
    def shape(self):
        return self.values.shape

    def to_csv(self, path) -> None:
        header = ",".join(f"f{j}" for j in range(self.values.shape[1]))
        np.savetxt(path, self.values, delimiter=",", header=header, comments="",
                   fmt="%.17g")


def dilated_convolve(series, weights, dilation: int) -> np.ndarray:
    """Convolve ``series`` with a dilated kernel, zero "same" padding.

    ``out[t] = sum_j weights[j] * x[t + (h - j) * dilation]`` with
    ``h = (len(weights) - 1) // 2`` and ``x`` zero outside its support, i.e.
    ``np.convolve(x, w, "same")`` with holes of ``dilation - 1`` between taps.

    >>> dilated_convolve([1, 2, 3, 4, 5], [1, 0, -1], 1)
    array([ 2.,  2.,  2.,  2., -4.])
    """
    x = np.ascontiguousarray(series, dtype=np.float64)
    w = np.ascontiguousarray(weights, dtype=np.float64)
    if x.ndim != 1 or w.ndim != 1:
        raise ShapeError("series and weights must be 1-D")
    if dilation < 1:
        raise DomainError(f"dilation must be >= 1, got {dilation}")
    field = (w.size - 1) * dilation + 1
    if x.size < field:
        raise DatasetTooShortError(
            f"series of length {x.size} shorter than receptive field {field}")
    return _kernels.conv_same(x, w, int(dilation))


def ppv(conv_output, bias: float) -> float:
    """Fraction of entries with ``conv_output - bias > 0`` (strict)."""
    v = np.asarray(conv_output, dtype=np.float64)
    if v.size == 0:
        raise DomainError("ppv of an empty vector")
    return float(np.count_nonzero(v - bias > 0.0)) / v.size


def transform_dataset(dataset, bank: FeatureBank) -> FeatureMatrix:
    """Map every series to its vector of PPV features.

    Entry ``(i, f)`` equals ``ppv(conv_i_f, bias_f)`` where ``conv_i_f`` is the
    dilated convolution of series ``i`` with feature ``f``. Work is spread
    over numba threads by series; every entry is computed independently in a
    fixed order, so results do not depend on the thread count.
    """
    dataset = as_dataset(dataset)
    if dataset.length != bank.fitted_input_length:
        raise ShapeError(
            f"bank fitted on length {bank.fitted_input_length}, "
            f"dataset has length {dataset.length}")
    dilations = bank.dilations
    max_pad = (bank.config.kernel_length - 1) // 2 * int(dilations.max())
    values = _kernels.transform_ppv(dataset.values, bank.weights, dilations, bank.biases,
                                    max_pad)
    return FeatureMatrix(values, bank.fingerprint())


def set_threads(n: int | None) -> int:
    """Set the numba worker count (``None`` keeps the current value)."""
    if n is not None:
        n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
        numba.set_num_threads(n)
    return numba.get_num_threads()

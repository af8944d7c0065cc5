"""PCA with the 1% explained-variance retention rule."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDataError, InsufficientDataError, ShapeError

__all__ = ["PcaModel", "Embedding", "fit_pca", "select_dims", "project"]

DEFAULT_THRESHOLD = 0.01


@dataclass(frozen=True, eq=False)
class PcaModel:
    """Fitted PCA.

    Attributes
    ----------
    means : ndarray of shape (F,)
    components : ndarray of shape (m, F)
        All computed principal axes, descending variance, orthonormal rows.
        Only the first ``retained`` are used by :func:`project`.
    explained_variance : ndarray of shape (m,)
        Sample variance (ddof=1) along each axis.
    explained_variance_ratio : ndarray of shape (m,)
    retained : int
    """

    means: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray
    explained_variance_ratio: np.ndarray
    retained: int

    @property
    def retained_components(self) -> np.ndarray:
        return self.components[: self.retained]

    def to_dict(self) -> dict:
        return {
            "means": self.means.tolist(),
            "components": self.retained_components.tolist(),
            "explained_variance": self.explained_variance.tolist(),
            "explained_variance_ratio": self.explained_variance_ratio.tolist(),
            "retained": self.retained,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "PcaModel":
        return cls(np.asarray(doc["means"], dtype=np.float64),
                   np.asarray(doc["components"], dtype=np.float64),
                   np.asarray(doc["explained_variance"], dtype=np.float64),
                   np.asarray(doc["explained_variance_ratio"], dtype=np.float64),
                   int(doc["retained"]))


@dataclass(frozen=True, eq=False)
class Embedding:
    values: np.ndarray

    @property
    def dims(self) -> int:
        return self.values.shape[1]


def select_dims(ratios, threshold: float = DEFAULT_THRESHOLD) -> int:
    """Number of leading ratios ``>= threshold``, at least 1.

    Ratios are sorted, so this is also the point at which one more dimension
    would add less than ``threshold`` of the total variance.

    >>> select_dims([0.6, 0.3, 0.05, 0.009, 0.001])
    3
    """
    r = np.asarray(ratios, dtype=np.float64)
    below = np.flatnonzero(r < threshold)
    count = int(below[0]) if below.size else r.size
    return max(count, 1)


def _values(features) -> np.ndarray:
    return np.asarray(getattr(features, "values", features), dtype=np.float64)


def fit_pca(features, threshold: float = DEFAULT_THRESHOLD) -> PcaModel:
    """Centered thin-SVD PCA.

    Components are oriented so that each one's largest-magnitude entry is
    positive, which makes the output independent of the LAPACK backend.

    Raises
    ------
    InsufficientDataError
        Fewer than two rows.
    DegenerateDataError
        All rows identical (zero total variance).
    """
    X = _values(features)
    if X.ndim != 2:
        raise ShapeError(f"features must be 2-D, got shape {X.shape}")
    n = X.shape[0]
    if n < 2:
        raise InsufficientDataError(f"PCA needs at least 2 series, got {n}")
    means = X.mean(axis=0)
    Xc = X - means
    _, s, vt = np.linalg.svd(Xc, full_matrices=False)
    power = s**2
    total = power.sum()
    if not total > 0.0:
        raise DegenerateDataError("zero total variance: every series has identical features")

    pivot = np.argmax(np.abs(vt), axis=1)
    signs = np.sign(vt[np.arange(vt.shape[0]), pivot])
    signs[signs == 0] = 1.0
    vt = vt * signs[:, None]

    ratios = power / total
    retained = min(select_dims(ratios, threshold), n - 1, X.shape[1])
    return PcaModel(means, vt, power / (n - 1), ratios, retained)


def project(features, model: PcaModel) -> Embedding:
    """``(X - means) @ components[:retained].T``."""
    X = _values(features)
    if X.ndim != 2 or X.shape[1] != model.means.shape[0]:
        raise ShapeError(
            f"features have shape {X.shape}, model expects {model.means.shape[0]} columns")
    return Embedding((X - model.means) @ model.retained_components.T)

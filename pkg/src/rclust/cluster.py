"""Lloyd's K-means with Euclidean distance and Forgy initialisation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InfeasibleError, ShapeError
from .randkit import RandomStream

__all__ = ["KMeansModel", "kmeans_fit", "assign", "squared_distances"]


@dataclass(frozen=True, eq=False)
class KMeansModel:
    centroids: np.ndarray
    assignments: np.ndarray
    inertia: float
    iterations_run: int
    converged: bool
    inertia_history: list = field(default_factory=list)

    @property
    def k(self) -> int:
        return self.centroids.shape[0]


def squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # explicit differences, not the |x|^2 - 2xc + |c|^2 expansion: exact zeros and ties
    diff = points[:, None, :] - centroids[None, :, :]
    return np.einsum("nkr,nkr->nk", diff, diff)


def _nearest(points, centroids):
    d2 = squared_distances(points, centroids)
    labels = np.argmin(d2, axis=1)  # first minimum == lowest index on ties
    return labels, d2[np.arange(points.shape[0]), labels]


def assign(model_or_centroids, points) -> np.ndarray:
    """Index of the nearest centroid for each point (lowest index on ties)."""
    centroids = getattr(model_or_centroids, "centroids", model_or_centroids)
    centroids = np.atleast_2d(np.asarray(centroids, dtype=np.float64))
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if points.shape[1] != centroids.shape[1]:
        raise ShapeError(
            f"points have dimension {points.shape[1]}, centroids {centroids.shape[1]}")
    return _nearest(points, centroids)[0]


def _repair_empty(points, centroids, labels, dist2):
    # move an empty cluster onto the point farthest from its centroid, then reassign
    k = centroids.shape[0]
    for _ in range(k):
        counts = np.bincount(labels, minlength=k)
        empty = np.flatnonzero(counts == 0)
        if empty.size == 0 or not np.any(dist2 > 0.0):
            break
        far = int(np.argmax(dist2))
        centroids[empty[0]] = points[far]
        labels, dist2 = _nearest(points, centroids)
    return labels, dist2


def _cluster_means(points, labels, centroids):
    k = centroids.shape[0]
    sums = np.zeros_like(centroids)
    np.add.at(sums, labels, points)
    counts = np.bincount(labels, minlength=k)
    out = centroids.copy()
    nonempty = counts > 0
    out[nonempty] = sums[nonempty] / counts[nonempty, None]
    return out


def kmeans_fit(points, k: int, stream: RandomStream, max_iter: int = 300,
               tol: float = 1e-4) -> KMeansModel:
    """Cluster ``points`` into ``k`` groups.

    Initial centroids are ``k`` rows chosen uniformly without replacement.
    Assignment and mean updates alternate until no centroid moves more than
    ``tol`` times the diagonal of the data's bounding box, or ``max_iter``
    updates have run. A cluster that empties is re-seeded with the point
    farthest from its centroid.

    The returned ``inertia_history`` holds the objective after every
    assignment step; it is non-increasing.
    """
    X = np.asarray(points, dtype=np.float64)
    if X.ndim != 2:
        raise ShapeError(f"points must be 2-D, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise DomainError("points contain NaN or Inf")
    n = X.shape[0]
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if k > n:
        raise InfeasibleError(f"k = {k} exceeds the number of points {n}")

    init = stream.generator.choice(n, size=k, replace=False)
    centroids = X[np.sort(init)].copy()
    diameter = float(np.linalg.norm(X.max(axis=0) - X.min(axis=0)))
    threshold = tol * diameter

    history = []
    converged = False
    iterations = 0
    labels, dist2 = _nearest(X, centroids)
    labels, dist2 = _repair_empty(X, centroids, labels, dist2)
    history.append(float(dist2.sum()))
    while iterations < max_iter:
        new = _cluster_means(X, labels, centroids)
        shift = float(np.sqrt(((new - centroids) ** 2).sum(axis=1)).max())
        centroids = new
        iterations += 1
        labels, dist2 = _nearest(X, centroids)
        labels, dist2 = _repair_empty(X, centroids, labels, dist2)
        history.append(float(dist2.sum()))
        if shift <= threshold:
            converged = True
            break

    return KMeansModel(centroids, labels, float(dist2.sum()), iterations, converged,
                       history)

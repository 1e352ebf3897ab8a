"""Minimal PCA / k-means / 1-NN toolkit for the clustering reproductions."""
from __future__ import annotations

import warnings
from itertools import permutations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .linalg import jacobi_eigh
from .synth import make_rng

__all__ = [
    "KMeans",
    "OneNearestNeighbor",
    "PCA",
    "clustering_accuracy",
    "kmeans",
    "knn1",
    "pca",
]


class PCA(TransformerMixin, BaseEstimator):
    """Projection on the leading eigenvectors of the sample covariance.

    Eigenvectors are sign-normalised (largest-magnitude entry positive) so the
    output is deterministic.
    """

    def __init__(self, n_components: int = 2, tol: float = 1e-10):
        self.n_components = n_components
        self.tol = tol

    def fit(self, X, y=None):
        X = check_array(X, ensure_min_samples=1)
        k = self.n_components
        if not 1 <= k <= X.shape[1]:
            raise ValueError(f"n_components must lie in [1, {X.shape[1]}], got {k}")
        self.mean_ = X.mean(axis=0)
        Xc = X - self.mean_
        cov = Xc.T @ Xc / max(len(X) - 1, 1)
        w, V = jacobi_eigh(cov)
        w, V = w[::-1], V[:, ::-1]
        top = w[:k]
        usable = top > self.tol * max(w[0], 1e-300)
        if not np.all(usable):
            warnings.warn(f"covariance has rank {int(usable.sum())} < {k}; returning fewer components",
                          RuntimeWarning, stacklevel=2)
        comps = V[:, :k][:, usable].T
        flip = np.sign(comps[np.arange(len(comps)), np.argmax(np.abs(comps), axis=1)])
        self.components_ = comps * flip[:, None]
        self.explained_variance_ = top[usable]
        return self

    def transform(self, X):
        check_is_fitted(self, "components_")
        X = check_array(X)
        return (X - self.mean_) @ self.components_.T


def _kmeans_pp(X, k, rng):
    centers = [X[rng.integers(len(X))]]
    d2 = np.sum((X - centers[0]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            idx = rng.integers(len(X))
        else:
            idx = int(np.searchsorted(np.cumsum(d2), rng.uniform(0, total)))
            idx = min(idx, len(X) - 1)
        centers.append(X[idx])
        d2 = np.minimum(d2, np.sum((X - X[idx]) ** 2, axis=1))
    return np.array(centers)


def _lloyd(X, centers, max_iter):
    labels = None
    for _ in range(max_iter):
        d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new = np.argmin(d2, axis=1)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        for j in range(len(centers)):
            members = X[labels == j]
            if len(members):
                centers[j] = members.mean(axis=0)
    d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = np.argmin(d2, axis=1)
    inertia = float(d2[np.arange(len(X)), labels].sum())
    return labels, centers, inertia


class KMeans(ClusterMixin, BaseEstimator):
    """Lloyd iterations from k-means++ seeds; best of ``n_init`` restarts."""

    def __init__(self, n_clusters: int = 2, n_init: int = 50, max_iter: int = 300, random_state: int = 0):
        self.n_clusters = n_clusters
        self.n_init = n_init
        self.max_iter = max_iter
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_array(X)
        k = self.n_clusters
        if not 1 <= k <= len(X):
            raise ValueError(f"n_clusters must lie in [1, {len(X)}], got {k}")
        best = None
        for restart in range(self.n_init):
            rng = make_rng(self.random_state, restart)
            labels, centers, inertia = _lloyd(X, _kmeans_pp(X, k, rng), self.max_iter)
            if best is None or inertia < best[2]:
                best = (labels, centers, inertia)
        self.labels_, self.cluster_centers_, self.inertia_ = best
        return self

    def predict(self, X):
        check_is_fitted(self, "cluster_centers_")
        X = check_array(X)
        d2 = ((X[:, None, :] - self.cluster_centers_[None, :, :]) ** 2).sum(axis=2)
        return np.argmin(d2, axis=1)


class OneNearestNeighbor(ClassifierMixin, BaseEstimator):
    """Label of the nearest training sample in Euclidean distance."""

    def fit(self, X, y):
        self.X_ = check_array(X)
        self.y_ = np.asarray(y)
        if len(self.y_) != len(self.X_):
            raise ValueError("X and y have different lengths")
        return self

    def predict(self, X):
        check_is_fitted(self, "X_")
        X = check_array(X)
        sq = np.sum(self.X_**2, axis=1)
        out = np.empty(len(X), dtype=self.y_.dtype)
        for start in range(0, len(X), 1024):
            B = X[start:start + 1024]
            d2 = np.sum(B**2, axis=1)[:, None] + sq[None, :] - 2 * B @ self.X_.T
            out[start:start + 1024] = self.y_[np.argmin(d2, axis=1)]
        return out


def pca(features, k: int) -> np.ndarray:
    return PCA(n_components=k).fit_transform(features)


def kmeans(features, k: int, seed: int = 0, n_init: int = 50) -> np.ndarray:
    return KMeans(n_clusters=k, n_init=n_init, random_state=seed).fit(features).labels_


def knn1(train, labels, test) -> np.ndarray:
    return OneNearestNeighbor().fit(train, labels).predict(test)


def clustering_accuracy(labels, truth) -> float:
    """Best agreement over relabelings of the predicted clusters."""
    labels, truth = np.asarray(labels), np.asarray(truth)
    ul, ut = np.unique(labels), np.unique(truth)
    if len(ul) > 8:
        raise ValueError("too many clusters for exhaustive relabeling")
    best = 0.0
    targets = list(ut) + [None] * max(0, len(ul) - len(ut))
    for perm in permutations(targets, len(ul)):
        mapping = dict(zip(ul, perm))
        best = max(best, float(np.mean([mapping[a] == b for a, b in zip(labels, truth)])))
    return best

import numpy as np
import pytest
from sklearn.utils.estimator_checks import check_get_params_invariance

from eulerist.learn import KMeans, OneNearestNeighbor, PCA, clustering_accuracy, kmeans, knn1, pca


def test_pca_two_points():
    X = np.array([[0.0, 0.0], [3.0, 4.0]])
    Z = PCA(1).fit(X)
    assert np.allclose(np.abs(Z.components_[0]), [0.6, 0.8])
    assert np.allclose(np.abs(pca(X, 1)[:, 0]), [2.5, 2.5])


def test_pca_matches_svd(rng):
    X = rng.normal(size=(50, 4)) @ rng.normal(size=(4, 4))
    Z = pca(X, 2)
    U, s, Vt = np.linalg.svd(X - X.mean(0), full_matrices=False)
    assert np.allclose(np.abs(Z), np.abs(U[:, :2] * s[:2]), atol=1e-8)


def test_pca_rank_deficient_warns():
    X = np.column_stack([np.arange(5.0), np.zeros(5)])
    with pytest.warns(RuntimeWarning):
        Z = pca(X, 2)
    assert Z.shape == (5, 1)
    with pytest.raises(ValueError):
        pca(X, 3)


def test_kmeans_k1_is_mean(rng):
    X = rng.normal(size=(30, 3))
    km = KMeans(1, n_init=3).fit(X)
    assert np.allclose(km.cluster_centers_[0], X.mean(0))


def test_kmeans_blobs(rng):
    X = np.vstack([rng.normal(0, 0.3, size=(100, 2)), rng.normal(5, 0.3, size=(100, 2))])
    truth = np.repeat([0, 1], 100)
    assert clustering_accuracy(kmeans(X, 2, seed=1), truth) >= 0.99
    assert np.array_equal(kmeans(X, 2, seed=1), kmeans(X, 2, seed=1))


def test_knn1(rng):
    train = np.array([[0.0], [10.0]])
    assert knn1(train, ["a", "b"], np.array([[1.0], [9.0], [4.9]])).tolist() == ["a", "b", "a"]


def test_clustering_accuracy_permutation():
    assert clustering_accuracy([1, 1, 0, 0], ["x", "x", "y", "y"]) == 1.0
    assert clustering_accuracy([0, 1, 0, 1], [0, 0, 1, 1]) == 0.5


def test_estimator_params():
    for est in (PCA(3), KMeans(4), OneNearestNeighbor()):
        check_get_params_invariance(type(est).__name__, est)
    assert KMeans(n_clusters=3).get_params()["n_clusters"] == 3

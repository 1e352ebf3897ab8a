"""Scikit-learn style wrappers: raw inputs -> filtrations -> feature vectors.

Chaining them in a :class:`sklearn.pipeline.Pipeline` gives a featurizer whose
grid is learnt on the training set only::

    Pipeline([("filt", PointCloudFiltration(max_scale=0.1)),
              ("ecc", EulerProfile(resolution=100, quantiles=(0.0, 1.0)))])
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .builders import cech, codensity, default_bandwidth, function_extension, rips
from .euler import GridSpec, compute_ecp, quantile_grid
from .graph import Graph, edge_function, graph_lower_star, vertex_function
from .transforms import DualGridSpec, get_kernel, ht_quantile_grid, hybrid_transform
from .validation import check_filtrations, check_point_cloud

__all__ = ["EulerProfile", "GraphFiltration", "HybridTransform", "PointCloudFiltration"]


def _as_list(X):
    if isinstance(X, np.ndarray) and X.ndim == 2:
        return [X]
    return list(X)


class PointCloudFiltration(TransformerMixin, BaseEstimator):
    """Rips or Čech filtration of each point cloud, optionally extended by
    a codensity axis (giving a bifiltration).

    Parameters
    ----------
    builder : {"rips", "cech"}
    max_dim : int
        Largest simplex dimension.
    max_scale : float or None
        Radius cut-off. ``None`` uses half the default KDE bandwidth of each
        cloud (half its median pairwise distance).
    codensity : bool
        Add a second parameter from a Gaussian KDE.
    bandwidth, post :
        Passed to :func:`eulerist.builders.codensity`.
    """

    def __init__(self, builder="rips", max_dim=1, max_scale=None, codensity=False,
                 bandwidth=None, post="neg"):
        self.builder = builder
        self.max_dim = max_dim
        self.max_scale = max_scale
        self.codensity = codensity
        self.bandwidth = bandwidth
        self.post = post

    def fit(self, X, y=None):
        if self.builder not in ("rips", "cech"):
            raise ValueError(f"builder must be 'rips' or 'cech', got {self.builder!r}")
        return self

    def _one(self, points):
        P = check_point_cloud(points)
        scale = self.max_scale
        if scale is None:
            scale = 0.5 * default_bandwidth(P) if len(P) > 1 else 1.0
        build = rips if self.builder == "rips" else cech
        f = build(P, self.max_dim, scale)
        if self.codensity:
            f = function_extension(f, codensity(P, self.bandwidth, self.post))
        return f

    def transform(self, X):
        self.fit(X)
        return [self._one(P) for P in _as_list(X)]


class GraphFiltration(TransformerMixin, BaseEstimator):
    """Lower-star filtration of each graph, one axis per function spec.

    Vertex functions: ``hks:<t>``, ``closeness``, ``attr:<column>``.
    Edge functions: ``forman``, ``betweenness``.
    """

    def __init__(self, vertex_functions=("hks:1.0",), edge_functions=()):
        self.vertex_functions = vertex_functions
        self.edge_functions = edge_functions

    def fit(self, X, y=None):
        if not list(self.vertex_functions) and not list(self.edge_functions):
            raise ValueError("need at least one vertex or edge function")
        return self

    def transform(self, X):
        self.fit(X)
        if isinstance(X, Graph):
            X = [X]
        out = []
        for g in X:
            if not isinstance(g, Graph):
                raise TypeError(f"expected Graph, got {type(g).__name__}")
            vfs = [vertex_function(g, s) for s in self.vertex_functions]
            efs = [edge_function(g, s) for s in self.edge_functions]
            out.append(graph_lower_star(g, vfs, efs))
        return out


def _pooled_values(filtrations):
    return np.vstack([f.values for f in filtrations])


class EulerProfile(TransformerMixin, BaseEstimator):
    """Euler characteristic profile sampled on a grid, flattened row-major.

    The grid is either given (``bounds``: one ``(lo, hi)`` per axis) or learnt
    in :meth:`fit` from percentiles of the critical values pooled over the
    training filtrations (``quantiles``: one ``(p, q)`` pair, or one per axis).
    """

    def __init__(self, resolution=30, bounds=None, quantiles=(0.0, 1.0)):
        self.resolution = resolution
        self.bounds = bounds
        self.quantiles = quantiles

    def fit(self, X, y=None):
        X = check_filtrations(X)
        if self.bounds is not None:
            bounds = [tuple(b) for b in self.bounds]
            if len(bounds) == 1 and X[0].m > 1:
                bounds = bounds * X[0].m
            self.grid_ = GridSpec.uniform(bounds, self.resolution)
        else:
            q = np.asarray(self.quantiles, dtype=float)
            pairs = [tuple(q)] if q.ndim == 1 else [tuple(r) for r in q]
            self.grid_ = quantile_grid(_pooled_values(X), pairs, self.resolution)
        if self.grid_.m != X[0].m:
            raise ValueError(f"grid has {self.grid_.m} axes, filtrations have {X[0].m} parameters")
        return self

    def transform(self, X):
        check_is_fitted(self, "grid_")
        X = check_filtrations(X)
        out = np.empty((len(X), self.grid_.size), dtype=np.int64)
        for i, f in enumerate(X):
            out[i] = compute_ecp(f, self.grid_).flat
        return out


class HybridTransform(TransformerMixin, BaseEstimator):
    """Hybrid transform sampled on a dual grid of directions, flattened.

    The dual grid is ``xi_bounds`` (one ``(lo, hi)`` per axis, ``lo >= 0``) or
    ``[0, alpha / v_i]`` with ``v_i`` the ``quantile`` percentile of the pooled
    axis-``i`` critical values.
    """

    def __init__(self, kernel="exp_pow:4", resolution=30, xi_bounds=None, quantile=0.5, alpha=1.0):
        self.kernel = kernel
        self.resolution = resolution
        self.xi_bounds = xi_bounds
        self.quantile = quantile
        self.alpha = alpha

    def fit(self, X, y=None):
        X = check_filtrations(X)
        self.kernel_ = get_kernel(self.kernel)
        m = X[0].m
        if self.xi_bounds is not None:
            bounds = [tuple(b) for b in self.xi_bounds]
            if len(bounds) == 1 and m > 1:
                bounds = bounds * m
            res = np.broadcast_to(np.asarray(self.resolution, dtype=int), (len(bounds),))
            self.grid_ = DualGridSpec(tuple(b[0] for b in bounds), tuple(b[1] for b in bounds),
                                      tuple(int(r) for r in res))
        else:
            self.grid_ = ht_quantile_grid(_pooled_values(X), self.quantile, self.alpha, self.resolution)
        if self.grid_.m != m:
            raise ValueError(f"grid has {self.grid_.m} axes, filtrations have {m} parameters")
        return self

    def transform(self, X):
        check_is_fitted(self, "grid_")
        X = check_filtrations(X)
        out = np.empty((len(X), self.grid_.size))
        for i, f in enumerate(X):
            out[i] = hybrid_transform(f, self.kernel_, self.grid_).flat
        return out

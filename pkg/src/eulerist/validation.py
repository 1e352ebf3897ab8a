"""Input checks shared by builders, estimators and the CLI."""
from __future__ import annotations

import numpy as np

from .complex import MultiFiltration


def check_point_cloud(points, *, allow_empty: bool = False, dims=None) -> np.ndarray:
    """Return ``points`` as a finite float array of shape ``(n, d)``."""
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1) if X.size else X.reshape(0, 1)
    if X.ndim != 2:
        raise ValueError(f"a point cloud is a 2-D array (n_points, dim), got shape {X.shape}")
    if X.shape[0] == 0 and not allow_empty:
        raise ValueError("point cloud is empty")
    if X.shape[1] < 1:
        raise ValueError("points need at least one coordinate")
    if not np.all(np.isfinite(X)):
        raise ValueError("point cloud has non-finite coordinates")
    if dims is not None and X.shape[1] not in dims:
        raise ValueError(f"unsupported dimension {X.shape[1]}; expected one of {sorted(dims)}")
    return X


def check_vertex_function(values, n_vertices: int | None = None) -> np.ndarray:
    """Return per-vertex values as an ``(n, m)`` float array."""
    F = np.asarray(values, dtype=float)
    if F.ndim == 1:
        F = F.reshape(-1, 1)
    if F.ndim != 2 or F.shape[1] < 1:
        raise ValueError(f"vertex function must be (n_vertices, m), got shape {F.shape}")
    if n_vertices is not None and F.shape[0] < n_vertices:
        raise ValueError(f"vertex function has {F.shape[0]} values, need {n_vertices}")
    if not np.all(np.isfinite(F)):
        raise ValueError("vertex function has non-finite values")
    return F


def check_filtrations(X) -> list[MultiFiltration]:
    """Accept one filtration or a sequence of them; check a common ``m``."""
    if isinstance(X, MultiFiltration):
        X = [X]
    X = list(X)
    if not X:
        raise ValueError("expected at least one filtration")
    for f in X:
        if not isinstance(f, MultiFiltration):
            raise TypeError(f"expected MultiFiltration, got {type(f).__name__}")
    ms = {f.m for f in X}
    if len(ms) != 1:
        raise ValueError(f"filtrations disagree on the number of parameters: {sorted(ms)}")
    return X


def check_positive(name: str, value) -> float:
    value = float(value)
    if not value > 0 or not np.isfinite(value):
        raise ValueError(f"{name} must be positive and finite, got {value}")
    return value

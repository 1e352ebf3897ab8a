"""One-critical filtrations built from point clouds.

Scale convention: every builder uses the ball radius, so an edge enters at half
the distance between its endpoints in both the Rips and the Cech complex.
"""
from __future__ import annotations

import logging
from itertools import combinations

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist, pdist

from .complex import MultiFiltration
from .validation import check_point_cloud, check_positive, check_vertex_function

__all__ = [
    "cech",
    "codensity",
    "default_bandwidth",
    "function_extension",
    "minimal_enclosing_ball",
    "rips",
    "triangle_circumradius",
]

log = logging.getLogger(__name__)


def _neighbor_pairs(X: np.ndarray, radius: float) -> tuple[np.ndarray, np.ndarray]:
    """Lexicographically sorted pairs ``i < j`` with ``|x_i - x_j| <= radius``
    and their distances."""
    tree = cKDTree(X)
    # widen the tree query by a hair, then filter exactly on our own distances
    pairs = tree.query_pairs(radius * (1 + 1e-9) + 1e-300, output_type="ndarray")
    if len(pairs) == 0:
        return np.empty((0, 2), dtype=np.int64), np.empty(0)
    pairs = np.sort(pairs, axis=1).astype(np.int64)
    dist = np.linalg.norm(X[pairs[:, 0]] - X[pairs[:, 1]], axis=1)
    keep = dist <= radius
    pairs, dist = pairs[keep], dist[keep]
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    return pairs[order], dist[order]


def _expand_cliques(n: int, edges: np.ndarray, max_dim: int) -> list[np.ndarray]:
    """Cliques of the graph by ordered expansion, one array per dimension.

    Each array lists its simplices in lexicographic order.
    """
    levels = [np.arange(n, dtype=np.int64).reshape(-1, 1), edges]
    if max_dim < 2 or len(edges) == 0:
        return levels[: max_dim + 1]
    upper: list[set] = [set() for _ in range(n)]
    for i, j in edges.tolist():
        upper[i].add(j)
    frontier = [((i, j), upper[i] & upper[j]) for i, j in edges.tolist()]
    for dim in range(2, max_dim + 1):
        nxt, rows = [], []
        last = dim == max_dim
        for simplex, cand in frontier:
            for v in sorted(cand):
                child = simplex + (v,)
                rows.append(child)
                if not last:
                    nxt.append((child, cand & upper[v]))
        levels.append(np.array(rows, dtype=np.int64).reshape(-1, dim + 1))
        frontier = nxt
        if not rows:
            break
    return levels


def _diameters(X: np.ndarray, simplices: np.ndarray) -> np.ndarray:
    k = simplices.shape[1]
    diam = np.zeros(len(simplices))
    for a, b in combinations(range(k), 2):
        d = np.linalg.norm(X[simplices[:, a]] - X[simplices[:, b]], axis=1)
        np.maximum(diam, d, out=diam)
    return diam


def _assemble(levels: list[np.ndarray], values: list[np.ndarray]) -> MultiFiltration:
    simplices = []
    for arr in levels:
        simplices.extend(map(tuple, arr.tolist()))
    vals = np.concatenate(values) if values else np.empty(0)
    return MultiFiltration(simplices, vals.reshape(-1, 1), m=1, presorted=True)


def rips(points, max_dim: int, max_scale: float) -> MultiFiltration:
    """Vietoris-Rips filtration with ``t(sigma) = diameter(sigma) / 2``.

    A simplex is included iff its diameter is at most ``2 * max_scale`` and its
    dimension at most ``max_dim``. Vertices enter at 0.
    """
    X = check_point_cloud(points)
    max_scale = check_positive("max_scale", max_scale)
    if max_dim < 0:
        raise ValueError("max_dim must be >= 0")
    n = len(X)
    if max_dim == 0:
        return _assemble([np.arange(n).reshape(-1, 1)], [np.zeros(n)])
    edges, dist = _neighbor_pairs(X, 2 * max_scale)
    levels = _expand_cliques(n, edges, max_dim)
    values = [np.zeros(n), dist / 2]
    for arr in levels[2:]:
        values.append(_diameters(X, arr) / 2)
    return _assemble(levels, values)


def _circumball(P: np.ndarray):
    """Smallest ball with all rows of ``P`` on its boundary, within their
    affine hull; ``None`` when the points are affinely dependent."""
    p0 = P[0]
    if len(P) == 1:
        return p0.copy(), 0.0
    A = P[1:] - p0
    G = A @ A.T
    rhs = 0.5 * np.diag(G)
    if len(P) == 2:
        return p0 + 0.5 * A[0], 0.5 * float(np.sqrt(G[0, 0]))
    scale = np.trace(G)
    if abs(np.linalg.det(G)) <= 1e-12 * scale ** len(G):
        return None
    lam = np.linalg.solve(G, rhs)
    c = p0 + lam @ A
    return c, float(np.linalg.norm(P[0] - c))


def _contains(center, radius, p, tol=1e-12) -> bool:
    return float(np.linalg.norm(p - center)) <= radius * (1 + tol) + tol


def _ball_from_support(S: list[np.ndarray]):
    P = np.array(S)
    ball = _circumball(P)
    if ball is not None:
        return ball
    # degenerate support: best ball spanned by a proper sub-support
    best = None
    for k in range(len(S) - 1, 0, -1):
        for sub in combinations(range(len(S)), k):
            cand = _circumball(P[list(sub)])
            if cand is None:
                continue
            if all(_contains(cand[0], cand[1], q) for q in P):
                if best is None or cand[1] < best[1]:
                    best = cand
        if best is not None:
            return best
    raise RuntimeError("could not resolve a degenerate support set")


def minimal_enclosing_ball(points) -> tuple[np.ndarray, float]:
    """Center and radius of the smallest closed ball containing ``points``.

    Move-to-front Welzl recursion; supports have at most ``d + 1`` points.
    """
    X = check_point_cloud(points)
    d = X.shape[1]
    pts = [p for p in X]

    def mtf(n: int, support: list):
        center, radius = _ball_from_support(support) if support else (pts[0].copy(), 0.0)
        if len(support) == d + 1:
            return center, radius
        i = 0
        while i < n:
            p = pts[i]
            if not _contains(center, radius, p):
                center, radius = mtf(i, support + [p])
                pts.insert(0, pts.pop(i))
            i += 1
        return center, radius

    return mtf(len(pts), [])


def triangle_circumradius(X: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Minimal-enclosing-ball radius of many triangles at once (any ambient d)."""
    a = X[triangles[:, 0]]
    b = X[triangles[:, 1]]
    c = X[triangles[:, 2]]
    s2 = np.stack(
        [np.sum((b - c) ** 2, axis=1), np.sum((a - c) ** 2, axis=1), np.sum((a - b) ** 2, axis=1)],
        axis=1,
    )
    longest = s2.max(axis=1)
    rest = s2.sum(axis=1) - longest
    area16 = 2 * (s2[:, 0] * s2[:, 1] + s2[:, 1] * s2[:, 2] + s2[:, 2] * s2[:, 0]) - np.sum(s2**2, axis=1)
    acute = (longest < rest) & (area16 > 0)
    r = np.sqrt(longest) / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        circ = np.sqrt(np.prod(s2, axis=1) / area16)
    r[acute] = circ[acute]
    return r


def cech(points, max_dim: int, max_scale: float) -> MultiFiltration:
    """Cech filtration: ``t(sigma)`` is the radius of the smallest ball
    enclosing the vertices of ``sigma``. Exact in dimensions 2 and 3."""
    X = check_point_cloud(points, dims={2, 3})
    d = X.shape[1]
    max_scale = check_positive("max_scale", max_scale)
    if not 0 <= max_dim <= d:
        raise ValueError(f"max_dim must lie in [0, {d}] for points in R^{d}")
    n = len(X)
    edges, dist = _neighbor_pairs(X, 2 * max_scale) if max_dim else (np.empty((0, 2), int), np.empty(0))
    levels = _expand_cliques(n, edges, max_dim)
    values = [np.zeros(n), dist / 2]
    lookup = [None, {tuple(e): v for e, v in zip(edges.tolist(), values[1])}]
    for dim in range(2, len(levels)):
        arr = levels[dim]
        if dim == 2:
            r = triangle_circumradius(X, arr)
        else:
            r = np.array([minimal_enclosing_ball(X[list(s)])[1] for s in arr])
        # clamp against facets so rounding never breaks monotonicity
        prev = lookup[dim - 1]
        rows = arr.tolist()
        for k, s in enumerate(rows):
            for facet in combinations(s, dim):
                r[k] = max(r[k], prev[facet])
        keep = r <= max_scale
        levels[dim] = arr[keep]
        values.append(r[keep])
        lookup.append({tuple(s): v for s, v, kp in zip(rows, r, keep) if kp})
        if dim < len(levels) - 1:
            # drop cofaces of rejected simplices before the next level
            nxt = levels[dim + 1]
            ok = [all(f in lookup[dim] for f in combinations(s, dim + 1)) for s in nxt.tolist()]
            levels[dim + 1] = nxt[np.array(ok, dtype=bool)] if len(nxt) else nxt
    return _assemble(levels[: len(values)], values)


def function_extension(base: MultiFiltration, f) -> MultiFiltration:
    """Append per-vertex functions as extra parameters (lower-star rule).

    ``t'(sigma) = (t(sigma), max_{v in sigma} f_1(v), ..., max_{v in sigma} f_k(v))``.
    """
    if base.m != 1:
        raise ValueError("function_extension expects a 1-parameter base filtration")
    F = check_vertex_function(f)
    top = max((s[-1] for s in base.simplices), default=-1)
    if F.shape[0] <= top:
        raise ValueError(f"vertex function has {F.shape[0]} values but vertex {top} is used")
    extra = np.empty((len(base), F.shape[1]))
    dims = base.dims
    for dim in np.unique(dims):
        rows = np.flatnonzero(dims == dim)
        verts = np.array([base.simplices[i] for i in rows], dtype=np.int64)
        extra[rows] = F[verts].max(axis=1)
    return MultiFiltration(base.simplices, np.hstack([base.values, extra]), presorted=True)


def default_bandwidth(points, sample: int = 200) -> float:
    """Median pairwise distance over an evenly strided subsample."""
    X = check_point_cloud(points)
    if len(X) < 2:
        return 1.0
    idx = np.unique(np.linspace(0, len(X) - 1, min(sample, len(X))).astype(int))
    h = float(np.median(pdist(X[idx])))
    return h if h > 0 else 1.0


def codensity(points, bandwidth: float | None = None, post: str = "neg") -> np.ndarray:
    """Gaussian kernel density at each data point, post-composed with a
    decreasing map (``neg``: x -> -x, ``gauss``: x -> exp(-x^2)).

    The estimator is the plain average of ``exp(-|x - x_i|^2 / 2h^2)``,
    without normalising constant. Returns an ``(n, 1)`` vertex function.
    """
    X = check_point_cloud(points)
    h = default_bandwidth(X) if bandwidth is None else check_positive("bandwidth", bandwidth)
    if post not in ("neg", "gauss"):
        raise ValueError(f"post must be 'neg' or 'gauss', got {post!r}")
    n = len(X)
    kde = np.empty(n)
    chunk = max(1, 2**22 // n)
    for start in range(0, n, chunk):
        d2 = cdist(X[start:start + chunk], X, "sqeuclidean")
        kde[start:start + chunk] = np.exp(-d2 / (2 * h * h)).mean(axis=1)
    out = -kde if post == "neg" else np.exp(-kde**2)
    return out.reshape(-1, 1)

"""Filtration functions on graphs and their lower-star filtrations."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .complex import MultiFiltration
from .linalg import jacobi_eigh

__all__ = [
    "Graph",
    "closeness_centrality",
    "edge_betweenness",
    "edge_function",
    "forman_curvature",
    "graph_lower_star",
    "hks",
    "normalized_laplacian",
    "vertex_function",
]

JACOBI_MAX_VERTICES = 256


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    ``edges`` is stored as a lexicographically sorted ``(E, 2)`` array with
    ``u < v`` per row; edge functions are arrays aligned with it.
    """

    n: int
    edges: np.ndarray
    attributes: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        n = int(self.n)
        E = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        if len(E):
            if np.any(E[:, 0] == E[:, 1]):
                raise ValueError("self-loops are not allowed")
            if E.min() < 0 or E.max() >= n:
                raise ValueError(f"edge endpoint outside 0..{n - 1}")
        E = np.sort(E, axis=1)
        E = E[np.lexsort((E[:, 1], E[:, 0]))] if len(E) else E
        if len(E) > 1 and np.any(np.all(E[1:] == E[:-1], axis=1)):
            raise ValueError("duplicate edges are not allowed")
        E.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", E)
        if self.attributes is not None:
            attrs = np.asarray(self.attributes, dtype=float)
            attrs = attrs.reshape(n, -1)
            object.__setattr__(self, "attributes", attrs)

    @classmethod
    def from_edges(cls, edges, n: int | None = None, attributes=None) -> "Graph":
        edges = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if n is None:
            n = int(edges.max()) + 1 if len(edges) else 0
        return cls(n, edges, attributes)

    @property
    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.n, self.n))
        if len(self.edges):
            A[self.edges[:, 0], self.edges[:, 1]] = 1
            A[self.edges[:, 1], self.edges[:, 0]] = 1
        return A

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges.tolist():
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def edge_index(self) -> dict[tuple[int, int], int]:
        return {(u, v): i for i, (u, v) in enumerate(self.edges.tolist())}


def normalized_laplacian(g: Graph) -> np.ndarray:
    """``I - D^-1/2 A D^-1/2``; isolated vertices keep a unit diagonal."""
    deg = g.degrees.astype(float)
    inv_sqrt = np.zeros_like(deg)
    inv_sqrt[deg > 0] = 1 / np.sqrt(deg[deg > 0])
    return np.eye(g.n) - inv_sqrt[:, None] * g.adjacency() * inv_sqrt[None, :]


def hks(g: Graph, t: float, eigensolver: str = "auto") -> np.ndarray:
    """Heat kernel signature ``sum_k exp(-t lambda_k) psi_k(v)^2`` per vertex.

    ``eigensolver`` is ``"jacobi"``, ``"lapack"`` or ``"auto"`` (Jacobi up to
    ``JACOBI_MAX_VERTICES`` vertices).
    """
    if not t > 0:
        raise ValueError(f"diffusion time must be positive, got {t}")
    if g.n == 0:
        raise ValueError("graph has no vertices")
    L = normalized_laplacian(g)
    if eigensolver == "auto":
        eigensolver = "jacobi" if g.n <= JACOBI_MAX_VERTICES else "lapack"
    if eigensolver == "jacobi":
        lam, psi = jacobi_eigh(L)
    elif eigensolver == "lapack":
        lam, psi = np.linalg.eigh(L)
    else:
        raise ValueError(f"unknown eigensolver {eigensolver!r}")
    return (psi**2) @ np.exp(-t * lam)


def forman_curvature(g: Graph) -> np.ndarray:
    """Combinatorial Forman curvature ``4 - deg(u) - deg(v)`` per edge."""
    deg = g.degrees
    if not len(g.edges):
        return np.empty(0)
    return (4 - deg[g.edges[:, 0]] - deg[g.edges[:, 1]]).astype(float)


def edge_betweenness(g: Graph) -> np.ndarray:
    """Unnormalised edge betweenness (Brandes), summed over unordered pairs."""
    adj = g.neighbors()
    index = g.edge_index()
    score = np.zeros(len(g.edges))
    for s in range(g.n):
        dist = [-1] * g.n
        sigma = [0] * g.n
        preds: list[list[int]] = [[] for _ in range(g.n)]
        dist[s], sigma[s] = 0, 1
        order = []
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * g.n
        for w in reversed(order):
            for v in preds[w]:
                credit = sigma[v] / sigma[w] * (1 + delta[w])
                score[index[(v, w) if v < w else (w, v)]] += credit
                delta[v] += credit
    # every unordered pair was counted from both endpoints
    return score / 2


def _bfs_distances(adj, s: int) -> dict[int, int]:
    dist = {s: 0}
    queue = deque([s])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def closeness_centrality(g: Graph) -> np.ndarray:
    """``(n_v - 1) / sum of distances`` within the component of ``v``."""
    adj = g.neighbors()
    out = np.zeros(g.n)
    for v in range(g.n):
        dist = _bfs_distances(adj, v)
        total = sum(dist.values())
        if total > 0:
            out[v] = (len(dist) - 1) / total
    return out


def graph_lower_star(g: Graph, vertex_functions=(), edge_functions=()) -> MultiFiltration:
    """Filtration of the 1-skeleton with one axis per supplied function.

    Vertex-function axes: vertices take their value, edges the max of their
    endpoints. Edge-function axes: edges take their value, vertices the min
    over incident edges (isolated vertices: the min over all edges, or 0 when
    the graph has none).
    """
    vfs = [np.asarray(f, dtype=float).reshape(g.n, -1) for f in vertex_functions]
    efs = [np.asarray(f, dtype=float).reshape(len(g.edges), -1) for f in edge_functions]
    cols_v = [c for f in vfs for c in f.T]
    cols_e = [c for f in efs for c in f.T]
    if not cols_v and not cols_e:
        raise ValueError("graph_lower_star needs at least one function")
    E = g.edges
    vert_vals, edge_vals = [], []
    for f in cols_v:
        vert_vals.append(f)
        edge_vals.append(np.maximum(f[E[:, 0]], f[E[:, 1]]) if len(E) else np.empty(0))
    for f in cols_e:
        fallback = float(f.min()) if len(f) else 0.0
        lifted = np.full(g.n, np.inf)
        if len(E):
            np.minimum.at(lifted, E[:, 0], f)
            np.minimum.at(lifted, E[:, 1], f)
        lifted[np.isinf(lifted)] = fallback
        vert_vals.append(lifted)
        edge_vals.append(f)
    simplices = [(v,) for v in range(g.n)] + [tuple(e) for e in E.tolist()]
    values = np.vstack([np.column_stack(vert_vals), np.column_stack(edge_vals).reshape(len(E), -1)])
    return MultiFiltration(simplices, values, presorted=True)


def vertex_function(g: Graph, spec: str) -> np.ndarray:
    """Resolve ``hks:<t>``, ``closeness`` or ``attr:<column>`` on ``g``."""
    name, _, arg = spec.partition(":")
    if name == "hks":
        return hks(g, float(arg) if arg else 1.0)
    if name == "closeness":
        return closeness_centrality(g)
    if name == "attr":
        if g.attributes is None:
            raise ValueError("graph has no vertex attributes")
        col = int(arg) if arg else 0
        if not 0 <= col < g.attributes.shape[1]:
            raise ValueError(f"attribute column {col} out of range")
        return g.attributes[:, col].copy()
    raise KeyError(f"unknown vertex function {spec!r}; known: hks:<t>, closeness, attr:<column>")


def edge_function(g: Graph, spec: str) -> np.ndarray:
    """Resolve ``forman`` or ``betweenness`` on ``g``."""
    if spec == "forman":
        return forman_curvature(g)
    if spec == "betweenness":
        return edge_betweenness(g)
    raise KeyError(f"unknown edge function {spec!r}; known: forman, betweenness")

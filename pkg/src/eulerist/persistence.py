"""Small-scale persistent homology, used to cross-check the Euler descriptors.

Clarity over speed: plain column reduction over Z/2 with columns stored as
Python integers used as bitsets.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .complex import MultiFiltration
from .euler import GridSpec, ProfileGrid
from .transforms import get_kernel

__all__ = [
    "PersistenceDiagram",
    "ecc_from_diagram",
    "ht_from_diagram",
    "reduce",
    "total_w1",
    "w1_diagram_distance",
]


@dataclass
class PersistenceDiagram:
    """Bars ``(birth, death)`` per homology degree; ``death`` may be ``inf``."""

    bars: dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, arr in self.bars.items():
            arr = np.asarray(arr, dtype=float).reshape(-1, 2)
            if len(arr) and (not np.all(np.isfinite(arr[:, 0])) or np.any(arr[:, 1] <= arr[:, 0])):
                raise ValueError(f"degree {k}: bars need finite births and death > birth")
            clean[int(k)] = arr
        self.bars = clean

    def __getitem__(self, k: int) -> np.ndarray:
        return self.bars.get(k, np.empty((0, 2)))

    @property
    def degrees(self) -> list[int]:
        return sorted(self.bars)

    def to_json(self) -> dict:
        def enc(x):
            return "inf" if math.isinf(x) else float(x)

        return {"degrees": {str(k): [[enc(a), enc(b)] for a, b in self.bars[k]] for k in self.degrees}}

    @classmethod
    def from_json(cls, doc: dict) -> "PersistenceDiagram":
        def dec(x):
            return math.inf if x == "inf" else float(x)

        return cls({int(k): [[dec(a), dec(b)] for a, b in v] for k, v in doc["degrees"].items()})


def reduce(filtration: MultiFiltration) -> PersistenceDiagram:
    """Persistence diagram of a 1-parameter filtration (Z/2 coefficients).

    Simplices are ordered by (value, dimension, lexicographic); zero-length
    bars are dropped.
    """
    if filtration.m != 1:
        raise ValueError(f"persistence needs a 1-parameter filtration, got m={filtration.m}")
    t = filtration.values[:, 0]
    simplices = filtration.simplices
    order = sorted(range(len(simplices)), key=lambda i: (t[i], len(simplices[i]), simplices[i]))
    position = {simplices[i]: r for r, i in enumerate(order)}
    pivots: dict[int, int] = {}
    columns: list[int] = []
    for i in order:
        s = simplices[i]
        col = 0
        if len(s) > 1:
            for j in range(len(s)):
                col |= 1 << position[s[:j] + s[j + 1:]]
        while col:
            low = col.bit_length() - 1
            other = pivots.get(low)
            if other is None:
                pivots[low] = len(columns)
                break
            col ^= columns[other]
        columns.append(col)
    bars: dict[int, list] = {}
    paired = set()
    for low, j in pivots.items():
        paired.add(low)
        paired.add(j)
        b, d = t[order[low]], t[order[j]]
        if d > b:
            bars.setdefault(len(simplices[order[low]]) - 1, []).append((b, d))
    for r, i in enumerate(order):
        if r not in paired and columns[r] == 0:
            bars.setdefault(len(simplices[i]) - 1, []).append((t[i], math.inf))
    return PersistenceDiagram({k: sorted(v) for k, v in bars.items()})


def ecc_from_diagram(diagram: PersistenceDiagram, spec: GridSpec) -> ProfileGrid:
    """Sample ``sum_k (-1)^k sum_i 1[a_i <= t < b_i]`` on a 1-axis grid."""
    if spec.m != 1:
        raise ValueError("diagram curves live on a 1-axis grid")
    t = spec.axes()[0]
    out = np.zeros(len(t), dtype=np.int64)
    for k in diagram.degrees:
        bars = diagram[k]
        alive = (bars[:, 0][None, :] <= t[:, None]) & (t[:, None] < bars[:, 1][None, :])
        out += (-1) ** k * alive.sum(axis=1)
    return ProfileGrid(spec, out, kind="ecp")


def ht_from_diagram(diagram: PersistenceDiagram, kernel, xi: float) -> float:
    """``sum_k (-1)^k sum_i (K(xi b_i) - K(xi a_i))`` with ``K(inf) = 0``."""
    kernel = get_kernel(kernel)
    if not xi > 0:
        raise ValueError("xi must be positive")
    total = 0.0
    for k in diagram.degrees:
        bars = diagram[k]
        finite = np.isfinite(bars[:, 1])
        if not kernel.vanishes_at_infinity and not np.all(finite):
            raise ValueError(f"kernel {kernel.name!r} has no limit at infinity; essential bars not allowed")
        at_death = np.zeros(len(bars))
        at_death[finite] = kernel(xi * bars[finite, 1])
        total += (-1) ** k * float(np.sum(at_death - kernel(xi * bars[:, 0])))
    return total


def w1_diagram_distance(d1, d2) -> float:
    """1-Wasserstein distance between two same-degree diagrams.

    Ground cost is the l1 norm, so a bar's distance to the diagonal is its
    length. Essential bars only match essential bars (cost |a - a'|); a count
    mismatch makes the distance infinite.
    """
    d1 = np.asarray(d1, dtype=float).reshape(-1, 2)
    d2 = np.asarray(d2, dtype=float).reshape(-1, 2)
    ess1, ess2 = np.isinf(d1[:, 1]), np.isinf(d2[:, 1])
    if ess1.sum() != ess2.sum():
        return math.inf
    cost = float(np.abs(np.sort(d1[ess1, 0]) - np.sort(d2[ess2, 0])).sum())
    F1, F2 = d1[~ess1], d2[~ess2]
    M, N = len(F1), len(F2)
    if M + N == 0:
        return cost
    C = np.zeros((M + N, M + N))
    C[:M, :N] = np.abs(F1[:, None, :] - F2[None, :, :]).sum(axis=2)
    big = np.inf
    diag1 = np.full((M, M), big)
    np.fill_diagonal(diag1, F1[:, 1] - F1[:, 0])
    diag2 = np.full((N, N), big)
    np.fill_diagonal(diag2, F2[:, 1] - F2[:, 0])
    C[:M, N:] = diag1
    C[M:, :N] = diag2
    rows, cols = linear_sum_assignment(C)
    return cost + float(C[rows, cols].sum())


def total_w1(a: PersistenceDiagram, b: PersistenceDiagram) -> float:
    """Sum over all homology degrees of the per-degree W1 distances."""
    return float(sum(w1_diagram_distance(a[k], b[k]) for k in set(a.degrees) | set(b.degrees)))

"""Signed barcodes of Euler profiles and the signed 1-Wasserstein distance."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .complex import MultiFiltration

__all__ = ["SignedBarcode", "evaluate_barcode", "signed_barcode", "signed_w1"]


@dataclass(frozen=True)
class SignedBarcode:
    """Disjoint multisets ``positive`` and ``negative`` of points in ``R^m``
    with ``ECP = sum_u 1[t >= u] - sum_v 1[t >= v]``."""

    m: int
    positive: np.ndarray
    negative: np.ndarray

    def __post_init__(self):
        for name in ("positive", "negative"):
            arr = np.asarray(getattr(self, name), dtype=float).reshape(-1, self.m)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return len(self.positive) + len(self.negative)

    def to_json(self) -> dict:
        return {"m": self.m, "positive": self.positive.tolist(), "negative": self.negative.tolist()}

    @classmethod
    def from_json(cls, doc: dict) -> "SignedBarcode":
        return cls(int(doc["m"]), doc["positive"], doc["negative"])


def _cancel(pos: np.ndarray, neg: np.ndarray):
    cp = Counter(map(tuple, pos.tolist()))
    cn = Counter(map(tuple, neg.tolist()))
    common = cp & cn
    cp -= common
    cn -= common

    def expand(c):
        return sorted(p for p, k in c.items() for _ in range(k))

    return expand(cp), expand(cn)


def signed_barcode(filtration: MultiFiltration) -> SignedBarcode:
    """Even-dimensional critical values count positively, odd ones negatively;
    coinciding points cancel with multiplicity (exact float equality)."""
    odd = (filtration.dims & 1).astype(bool)
    pos, neg = _cancel(filtration.values[~odd], filtration.values[odd])
    return SignedBarcode(filtration.m, pos, neg)


def evaluate_barcode(barcode: SignedBarcode, points) -> np.ndarray:
    """Value of the finitely presented function at each row of ``points``."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    up = np.all(barcode.positive[None, :, :] <= P[:, None, :], axis=2).sum(axis=1)
    down = np.all(barcode.negative[None, :, :] <= P[:, None, :], axis=2).sum(axis=1)
    return up - down


def signed_w1(a: SignedBarcode, b: SignedBarcode) -> float:
    """Minimal l1 matching cost between ``a+ u b-`` and ``a- u b+``.

    Infinite when the two sides differ in size.
    """
    if a.m != b.m:
        raise ValueError("barcodes live in different dimensions")
    left = np.vstack([a.positive, b.negative])
    right = np.vstack([a.negative, b.positive])
    if len(left) != len(right):
        return math.inf
    if len(left) == 0:
        return 0.0
    C = np.abs(left[:, None, :] - right[None, :, :]).sum(axis=2)
    rows, cols = linear_sum_assignment(C)
    return float(C[rows, cols].sum())

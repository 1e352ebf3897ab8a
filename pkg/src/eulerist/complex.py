"""Simplicial complexes and one-critical multi-parameter filtrations.

A filtration is stored flat: one row per simplex, sorted by dimension and then
lexicographically, with a dense ``(n_simplices, m)`` array of critical values.
Every simplex enters the filtration at exactly one critical value ``t(sigma)``;
the sublevel complex at ``u`` is ``{sigma : t(sigma) <= u}`` coordinatewise.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "FiltrationError",
    "MultiFiltration",
    "ValidationIssue",
    "ValidationReport",
    "canonical_simplex",
    "euler_characteristic",
    "faces",
    "validate",
]


class FiltrationError(ValueError):
    """Raised when a complex or filtration violates a structural requirement."""


def canonical_simplex(vertices: Iterable[int]) -> tuple[int, ...]:
    simplex = tuple(sorted(int(v) for v in vertices))
    if not simplex:
        raise FiltrationError("a simplex needs at least one vertex")
    if simplex[0] < 0:
        raise FiltrationError(f"negative vertex identifier in {simplex}")
    if any(a == b for a, b in zip(simplex, simplex[1:])):
        raise FiltrationError(f"repeated vertex in simplex {simplex}")
    return simplex


def faces(simplex: tuple[int, ...], proper: bool = True):
    """Yield the non-empty faces of ``simplex`` (proper ones only by default)."""
    top = len(simplex) - 1 if proper else len(simplex)
    for k in range(1, top + 1):
        yield from combinations(simplex, k)


def _sort_key(simplex):
    return (len(simplex), simplex)


class MultiFiltration:
    """A one-critical ``m``-parameter filtered simplicial complex.

    Parameters
    ----------
    simplices : iterable of vertex iterables
        Each entry is canonicalised to a strictly increasing tuple.
    values : array_like, shape (n_simplices, m) or (n_simplices,)
        Critical value of each simplex. A 1-D array means ``m = 1``.
    m : int, optional
        Number of parameters; only needed to disambiguate an empty filtration.

    presorted : bool
        Trust that ``simplices`` are canonical tuples already in
        (dimension, lexicographic) order. Used by builders on hot paths.

    Construction does not check closure or monotonicity, so that invalid
    inputs can still be diagnosed with :func:`validate`.
    """

    __slots__ = ("_simplices", "_values", "_dims", "_index")

    def __init__(self, simplices, values, m: int | None = None, *, presorted: bool = False):
        if presorted:
            simplices = list(simplices)
        else:
            simplices = [canonical_simplex(s) for s in simplices]
        n = len(simplices)
        values = np.asarray(values, dtype=np.float64)
        if values.size == 0 and n == 0:
            values = np.empty((0, m if m is not None else 1))
        elif values.ndim == 1:
            values = values.reshape(n, -1) if n else values
        if values.ndim != 2 or values.shape[0] != n:
            raise FiltrationError(
                f"expected {len(simplices)} critical values, got array of shape {values.shape}"
            )
        if m is not None and values.shape[1] != m:
            raise FiltrationError(f"expected m={m} parameters, got {values.shape[1]}")
        if values.shape[1] < 1:
            raise FiltrationError("a filtration needs at least one parameter")
        if not presorted:
            order = sorted(range(len(simplices)), key=lambda i: _sort_key(simplices[i]))
            simplices = [simplices[i] for i in order]
            values = values[order]
        values = np.ascontiguousarray(values)
        values.setflags(write=False)
        dims = np.fromiter((len(s) - 1 for s in simplices), dtype=np.int64, count=len(simplices))
        dims.setflags(write=False)
        self._simplices = tuple(simplices)
        self._values = values
        self._dims = dims
        self._index = None

    @classmethod
    def from_dict(cls, mapping: dict, m: int | None = None) -> "MultiFiltration":
        """Build from ``{simplex: value}``; scalar values mean ``m = 1``."""
        items = list(mapping.items())
        vals = [np.atleast_1d(np.asarray(v, dtype=float)) for _, v in items]
        if m is None:
            m = len(vals[0]) if vals else 1
        return cls([s for s, _ in items], np.array(vals, dtype=float).reshape(len(items), m), m=m)

    @property
    def m(self) -> int:
        return self._values.shape[1]

    @property
    def simplices(self) -> tuple[tuple[int, ...], ...]:
        return self._simplices

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def dims(self) -> np.ndarray:
        return self._dims

    @property
    def signs(self) -> np.ndarray:
        """``(-1)**dim`` for each simplex, as int64."""
        return 1 - 2 * (self._dims & 1)

    @property
    def max_dim(self) -> int:
        return int(self._dims.max()) if len(self._dims) else -1

    def __len__(self) -> int:
        return len(self._simplices)

    def __iter__(self):
        return zip(self._simplices, self._values)

    def __repr__(self) -> str:
        return f"MultiFiltration(n_simplices={len(self)}, m={self.m}, max_dim={self.max_dim})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiFiltration):
            return NotImplemented
        return self._simplices == other._simplices and np.array_equal(self._values, other._values)

    def index(self) -> dict:
        """Map simplex -> row. Duplicated simplices map to their last row."""
        if self._index is None:
            self._index = {s: i for i, s in enumerate(self._simplices)}
        return self._index

    def vertices(self) -> list[int]:
        return [s[0] for s in self._simplices if len(s) == 1]

    def value_of(self, simplex) -> np.ndarray:
        return self._values[self.index()[canonical_simplex(simplex)]]

    def sublevel(self, u) -> list[tuple[int, ...]]:
        """Simplices with ``t(sigma) <= u`` in every coordinate."""
        u = np.broadcast_to(np.asarray(u, dtype=float), (self.m,))
        mask = np.all(self._values <= u, axis=1)
        return [s for s, keep in zip(self._simplices, mask) if keep]

    def with_values(self, values) -> "MultiFiltration":
        """Same complex (same row order) with new critical values."""
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        return MultiFiltration(self._simplices, values, presorted=True)

    def rescalarize(self, xi) -> "MultiFiltration":
        """The 1-parameter filtration with filter ``<xi, t(sigma)>``."""
        xi = np.asarray(xi, dtype=float).reshape(-1)
        if xi.shape != (self.m,):
            raise FiltrationError(f"xi has {xi.size} entries, filtration has m={self.m}")
        return self.with_values(self._values @ xi)

    def relabel(self, offset: int) -> "MultiFiltration":
        return MultiFiltration(
            [tuple(v + offset for v in s) for s in self._simplices], self._values, presorted=True
        )

    def disjoint_union(self, other: "MultiFiltration") -> "MultiFiltration":
        """Union with ``other`` after shifting its vertex ids past ours."""
        if other.m != self.m:
            raise FiltrationError("cannot join filtrations with different m")
        offset = 1 + max((s[-1] for s in self._simplices), default=-1)
        shifted = other.relabel(offset)
        return MultiFiltration(
            self._simplices + shifted._simplices,
            np.vstack([self._values, shifted._values]),
        )


@dataclass(frozen=True)
class ValidationIssue:
    kind: str  # "duplicate" | "missing_face" | "monotonicity" | "non_finite"
    simplex: tuple[int, ...]
    other: tuple[int, ...] | None = None
    detail: str = ""

    def __str__(self) -> str:
        if self.kind == "missing_face":
            return f"missing face {self.other} of simplex {self.simplex}"
        if self.kind == "monotonicity":
            return f"face {self.other} enters after coface {self.simplex}: {self.detail}"
        if self.kind == "duplicate":
            return f"simplex {self.simplex} appears more than once"
        return f"simplex {self.simplex}: {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[ValidationIssue, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.issues

    def __bool__(self) -> bool:
        return self.ok

    def __len__(self) -> int:
        return len(self.issues)

    def of_kind(self, kind: str) -> list[ValidationIssue]:
        return [i for i in self.issues if i.kind == kind]

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "\n".join(str(i) for i in self.issues)


def validate(filtration: MultiFiltration) -> ValidationReport:
    """List every violated filtration invariant; empty report iff valid."""
    issues: list[ValidationIssue] = []
    simplices = filtration.simplices
    values = filtration.values

    seen: dict[tuple[int, ...], int] = {}
    for i, s in enumerate(simplices):
        if s in seen:
            issues.append(ValidationIssue("duplicate", s))
        else:
            seen[s] = i

    bad = ~np.all(np.isfinite(values), axis=1)
    for i in np.flatnonzero(bad):
        issues.append(ValidationIssue("non_finite", simplices[i], detail="non-finite critical value"))

    reported_missing: set[tuple[tuple[int, ...], tuple[int, ...]]] = set()
    for i, s in enumerate(simplices):
        if len(s) == 1:
            continue
        ts = values[i]
        for face in faces(s):
            j = seen.get(face)
            if j is None:
                if (s, face) not in reported_missing:
                    reported_missing.add((s, face))
                    issues.append(ValidationIssue("missing_face", s, face))
                continue
            # facets suffice for monotonicity once closure holds; lower faces are
            # checked too so a missing intermediate face cannot hide a breach
            tf = values[j]
            if np.any(tf > ts):
                issues.append(
                    ValidationIssue(
                        "monotonicity", s, face, detail=f"t{face}={tf.tolist()} > t{s}={ts.tolist()}"
                    )
                )
    return ValidationReport(tuple(issues))


def euler_characteristic(complex_: Iterable[Sequence[int]]) -> int:
    """Alternating count of simplices of a face-closed complex."""
    simplices = {canonical_simplex(s) for s in complex_}
    for s in simplices:
        if len(s) > 1:
            for facet in combinations(s, len(s) - 1):
                if facet not in simplices:
                    raise FiltrationError(f"complex is not closed: face {facet} of {s} missing")
    return sum(1 if len(s) % 2 else -1 for s in simplices)

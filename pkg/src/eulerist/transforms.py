"""Hybrid transforms of Euler characteristic profiles.

For a one-critical filtration the transform with kernel ``kappa`` reads

    HT(xi) = - sum_sigma (-1)^dim(sigma) K(<xi, t(sigma)>)

where ``K`` is the primitive of ``kappa`` vanishing at +infinity. Kernels are
specified through ``K`` directly (the "primitive kernel").
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .complex import MultiFiltration
from .euler import GridSpec, ProfileGrid, _check_direction, _critical_values

__all__ = [
    "BUILTIN_KERNELS",
    "DualGridSpec",
    "PrimitiveKernel",
    "cosine",
    "exp_neg",
    "exp_pow",
    "get_kernel",
    "ht_quantile_grid",
    "hybrid_transform",
    "hybrid_transform_at",
    "numeric_ht_oracle",
    "pow_exp_pow",
    "restriction_curve",
]

# cells per evaluation block; bounds peak memory of the (block, grid) array
_BLOCK_CELLS = 1 << 22


@dataclass(frozen=True)
class PrimitiveKernel:
    """A primitive kernel ``K`` together with the facts the algorithms need.

    ``func`` must be vectorised over numpy arrays. Built-in kernels refuse
    negative arguments (``accepts_negative=False``); a user kernel may opt in.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    vanishes_at_infinity: bool = True
    support_T: float | None = None
    accepts_negative: bool = False
    params: dict = field(default_factory=dict)

    def __call__(self, s):
        return self.func(np.asarray(s, dtype=float))

    @property
    def spec(self) -> str:
        """Round-trippable ``name[:p]`` string."""
        if "p" in self.params:
            return f"{self.name}:{self.params['p']!r}"
        return self.name

    def __reduce__(self):
        # built-ins close over lambdas; rebuild them from their spec instead
        if self.name in BUILTIN_KERNELS and getattr(self.func, "__module__", None) in (__name__, "numpy"):
            return get_kernel, (self.spec,)
        return object.__reduce__(self)


def exp_neg() -> PrimitiveKernel:
    return PrimitiveKernel("exp_neg", lambda s: -np.exp(-s))


def exp_pow(p: float) -> PrimitiveKernel:
    p = float(p)
    if not p > 0:
        raise ValueError(f"exponent must be positive, got {p}")
    return PrimitiveKernel("exp_pow", lambda s: -np.exp(-np.power(s, p)), params={"p": p})


def pow_exp_pow(p: float) -> PrimitiveKernel:
    p = float(p)
    if not p > 0:
        raise ValueError(f"exponent must be positive, got {p}")

    def K(s):
        sp = np.power(s, p)
        return -sp * np.exp(-sp)

    return PrimitiveKernel("pow_exp_pow", K, params={"p": p})


def cosine() -> PrimitiveKernel:
    # kappa = -sin is not integrable; the transform is the formal finite sum
    return PrimitiveKernel("cosine", np.cos, vanishes_at_infinity=False)


BUILTIN_KERNELS = {
    "exp_neg": (exp_neg, False),
    "exp_pow": (exp_pow, True),
    "pow_exp_pow": (pow_exp_pow, True),
    "cosine": (cosine, False),
}


def get_kernel(spec: str | PrimitiveKernel) -> PrimitiveKernel:
    """Resolve ``"name"`` or ``"name:p"`` to a built-in kernel."""
    if isinstance(spec, PrimitiveKernel):
        return spec
    name, _, arg = str(spec).partition(":")
    if name not in BUILTIN_KERNELS:
        raise KeyError(f"unknown kernel {name!r}; built-ins: {', '.join(BUILTIN_KERNELS)}")
    factory, takes_p = BUILTIN_KERNELS[name]
    if takes_p:
        if not arg:
            raise ValueError(f"kernel {name!r} needs an exponent, e.g. {name}:4")
        return factory(float(arg))
    if arg:
        raise ValueError(f"kernel {name!r} takes no parameter")
    return factory()


class DualGridSpec(GridSpec):
    """Grid over the dual positive cone: every axis lies in ``[0, inf)``."""

    def __post_init__(self):
        super().__post_init__()
        if any(a < 0 for a in self.mins):
            raise ValueError(f"dual grid bounds must be non-negative, got mins={self.mins}")


def _check_arguments(filtration: MultiFiltration, kernel: PrimitiveKernel):
    if not kernel.accepts_negative and len(filtration) and filtration.values.min() < 0:
        raise ValueError(
            f"kernel {kernel.name!r} is defined on [0, inf) but the filtration has "
            f"negative critical values (min {filtration.values.min()})"
        )


def hybrid_transform(filtration: MultiFiltration, kernel, spec: GridSpec) -> ProfileGrid:
    """Evaluate the hybrid transform on every point of the tensor grid ``spec``.

    Costs ``O(|K| * d_1 ... d_m)``; simplices are processed in fixed-size
    blocks and the block sums are added in order, so results are reproducible.
    """
    kernel = get_kernel(kernel)
    if spec.m != filtration.m:
        raise ValueError(f"grid has {spec.m} axes, filtration has m={filtration.m}")
    if any(a < 0 for a in spec.mins):
        raise ValueError("hybrid transforms are evaluated on non-negative xi")
    _check_arguments(filtration, kernel)
    axes = spec.axes()
    values = filtration.values
    signs = filtration.signs.astype(float)
    out = np.zeros(spec.shape)
    block = max(1, _BLOCK_CELLS // max(spec.size, 1))
    m = filtration.m
    for start in range(0, len(filtration), block):
        t = values[start:start + block]
        # <xi, t> over the tensor grid, built axis by axis
        dots = np.zeros((t.shape[0],) + (1,) * m)
        for i, axis in enumerate(axes):
            shape = [t.shape[0]] + [1] * m
            shape[i + 1] = len(axis)
            dots = dots + (t[:, i, None] * axis[None, :]).reshape(shape)
        out -= np.tensordot(signs[start:start + block], kernel(dots), axes=(0, 0))
    grid = ProfileGrid(spec, out, kind="ht", meta={"kernel": kernel.name, **kernel.params})
    return grid


def hybrid_transform_at(filtration: MultiFiltration, kernel, xis) -> np.ndarray:
    """Hybrid transform at arbitrary points ``xis`` of shape ``(n, m)``."""
    kernel = get_kernel(kernel)
    xis = np.atleast_2d(np.asarray(xis, dtype=float))
    if xis.shape[1] != filtration.m:
        raise ValueError(f"points must have {filtration.m} coordinates")
    if np.any(xis < 0):
        raise ValueError("hybrid transforms are evaluated on non-negative xi")
    _check_arguments(filtration, kernel)
    signs = filtration.signs.astype(float)
    return -(kernel(filtration.values @ xis.T).T @ signs)


def restriction_curve(filtration: MultiFiltration, kernel, xi, lambdas: GridSpec) -> ProfileGrid:
    """``lambda -> HT(lambda * xi)``, computed as the 1-parameter transform of
    the pushforward along ``xi``."""
    xi = _check_direction(xi, filtration.m)
    if lambdas.m != 1:
        raise ValueError("lambdas must be a 1-axis grid")
    grid = hybrid_transform(filtration.rescalarize(xi), kernel, lambdas)
    grid.meta["xi"] = xi.tolist()
    return grid


def ht_quantile_grid(values_or_filtration, p, alpha: float, resolution) -> DualGridSpec:
    """Dual grid ``[0, alpha / v_i]`` per axis, ``v_i`` the ``p_i``-percentile
    of the axis-``i`` critical values."""
    values = _critical_values(values_or_filtration)
    m = values.shape[1]
    p = np.broadcast_to(np.asarray(p, dtype=float), (m,))
    resolution = np.broadcast_to(np.asarray(resolution, dtype=int), (m,))
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if np.any((p < 0) | (p > 1)):
        raise ValueError(f"quantiles must lie in [0, 1], got {p.tolist()}")
    if values.shape[0] == 0:
        raise ValueError("cannot take percentiles of an empty filtration")
    v = np.array([np.quantile(values[:, i], p[i]) for i in range(m)])
    if np.any(v <= 0):
        raise ValueError(f"percentile values must be positive to bound the dual grid, got {v.tolist()}")
    return DualGridSpec((0.0,) * m, tuple(alpha / v), tuple(resolution))


def _tail_cutoff(kernel: PrimitiveKernel, tol: float = 1e-10) -> float:
    if kernel.support_T is not None:
        return float(kernel.support_T)
    s = 1.0
    # |K| must stay below tol from the cutoff on; probe a few points past it
    while s < 1e8:
        probe = kernel(np.array([s, 1.5 * s, 2 * s, 4 * s]))
        if np.all(np.abs(probe) < tol):
            return s
        s *= 1.5
    raise ValueError(f"kernel {kernel.name!r} does not decay below {tol}")


def numeric_ht_oracle(filtration: MultiFiltration, kernel, xi, quad_step: float = 1e-3) -> float:
    """Quadrature value of ``int kappa(s) (xi_* ECP)(s) ds``.

    ``kappa`` is recovered from ``K`` by central differences and integrated by
    the midpoint rule on each interval where the pushforward Euler curve is
    constant, so the rule stays second order. A verification tool only.
    """
    kernel = get_kernel(kernel)
    if not quad_step > 0:
        raise ValueError("quad_step must be positive")
    if not kernel.vanishes_at_infinity and kernel.support_T is None:
        raise ValueError(f"kernel {kernel.name!r} has a non-convergent tail; quadrature refused")
    xi = np.asarray(xi, dtype=float).reshape(-1)
    _check_arguments(filtration, kernel)
    s_vals = filtration.values @ xi
    signs = filtration.signs
    if len(s_vals) == 0:
        return 0.0
    start = min(0.0, float(s_vals.min()))
    stop = float(s_vals.max()) + _tail_cutoff(kernel)
    cuts = np.unique(np.concatenate([[start, stop], s_vals]))
    h_diff = 1e-5

    def kappa(s):
        lo = s - h_diff
        if not kernel.accepts_negative:
            # one-sided near the origin keeps the stencil in K's domain
            lo = np.maximum(lo, 0.0)
        hi = lo + 2 * h_diff
        return (kernel(hi) - kernel(lo)) / (hi - lo)

    order = np.argsort(s_vals, kind="stable")
    sorted_s, sorted_sign = s_vals[order], signs[order]
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        n = max(1, math.ceil((b - a) / quad_step))
        h = (b - a) / n
        mids = a + h * (np.arange(n) + 0.5)
        chi = int(sorted_sign[: np.searchsorted(sorted_s, a, side="right")].sum())
        if chi:
            total += chi * h * float(np.sum(kappa(mids)))
    return total

"""Seeded synthetic point clouds and a Monte-Carlo harness.

Randomness contract: every sampler is a pure function of its parameters and an
unsigned 64-bit seed. Streams come from numpy's counter-based Philox generator
keyed by ``SeedSequence(seed, spawn_key=key)``, so child streams (one per
replication, say) are derived by key, independent of scheduling.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "MCResult",
    "make_rng",
    "mc_harness",
    "orbit",
    "rescale",
    "rejection_torus_angles",
    "sample_clutter",
    "sample_orbit",
    "sample_poisson",
    "sample_sphere",
    "sample_torus",
    "CLUTTER_SEGMENTS",
]

CLUTTER_SEGMENTS = (
    ((0.1, 0.1), (0.9, 0.9)),
    ((0.1, 0.9), (0.9, 0.1)),
)


def make_rng(seed: int, *key: int) -> np.random.Generator:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def orbit(x0: float, y0: float, rho: float, n: int) -> np.ndarray:
    """The first ``n`` points of the linked twist map started at ``(x0, y0)``.

    The y-update uses the freshly computed x.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    out = np.empty((n, 2))
    x, y = float(x0), float(y0)
    out[0] = x, y
    for i in range(1, n):
        x = (x + rho * y * (1 - y)) % 1.0
        y = (y + rho * x * (1 - x)) % 1.0
        out[i] = x, y
    return out


def sample_orbit(rho: float, n: int, seed: int) -> np.ndarray:
    if not rho > 0:
        raise ValueError("rho must be positive")
    x0, y0 = make_rng(seed).uniform(size=2)
    return orbit(x0, y0, rho, n)


def sample_poisson(intensity: float, cube_side: float, d: int, seed: int) -> np.ndarray:
    """Homogeneous Poisson process on ``[0, cube_side]^d``."""
    if not intensity > 0:
        raise ValueError("intensity must be positive")
    if cube_side < 0 or d < 1:
        raise ValueError("need cube_side >= 0 and d >= 1")
    rng = make_rng(seed)
    count = rng.poisson(intensity * cube_side**d)
    return rng.uniform(0.0, cube_side, size=(count, d))


def _torus_embed(theta, phi):
    r = 2 + np.cos(theta)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), np.sin(theta)])


def rejection_torus_angles(n: int, rng: np.random.Generator):
    """Angles distributed by area on the torus (R=2, r=1) by rejection:
    a uniform proposal ``theta`` is kept with probability ``(2 + cos theta) / 3``.

    Returns ``(theta, phi, n_proposals)``.
    """
    thetas = []
    proposals = 0
    while sum(len(t) for t in thetas) < n:
        batch = max(16, int(1.6 * (n - sum(len(t) for t in thetas))))
        theta = rng.uniform(0, 2 * np.pi, size=batch)
        u = rng.uniform(size=batch)
        accepted = np.flatnonzero(u < (2 + np.cos(theta)) / 3)
        need = n - sum(len(t) for t in thetas)
        if len(accepted) > need:
            # count proposals only up to the last one we keep
            accepted = accepted[:need]
            proposals += int(accepted[-1]) + 1
        else:
            proposals += batch
        thetas.append(theta[accepted])
    theta = np.concatenate(thetas) if thetas else np.empty(0)
    phi = rng.uniform(0, 2 * np.pi, size=n)
    return theta, phi, proposals


def sample_torus(n: int, uniform: bool, seed: int) -> np.ndarray:
    """Points on the torus of radii 2 and 1 in R^3, area-uniform or with
    uniform angles."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = make_rng(seed)
    if uniform:
        theta, phi, _ = rejection_torus_angles(n, rng)
    else:
        theta = rng.uniform(0, 2 * np.pi, size=n)
        phi = rng.uniform(0, 2 * np.pi, size=n)
    return _torus_embed(theta, phi)


def sample_sphere(n: int, uniform: bool, seed: int, phi_scale: float = 1.0) -> np.ndarray:
    """Points on the unit sphere: uniform (normalised Gaussians), or polar
    angle uniform on ``[0, pi]`` with azimuth ``N(pi, phi_scale^2)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = make_rng(seed)
    if uniform:
        g = rng.normal(size=(n, 3))
        norms = np.linalg.norm(g, axis=1)
        while np.any(norms == 0):
            bad = norms == 0
            g[bad] = rng.normal(size=(int(bad.sum()), 3))
            norms = np.linalg.norm(g, axis=1)
        return g / norms[:, None]
    theta = rng.uniform(0, np.pi, size=n)
    phi = rng.normal(np.pi, phi_scale, size=n)
    P = np.column_stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
    return P / np.linalg.norm(P, axis=1)[:, None]


CLUTTER_TOTAL = 1000


def sample_clutter(n_noise: int | None = None, n_line: int = 60, lines: int = 1,
                   jitter: float = 0.001, seed: int = 0) -> np.ndarray:
    """Uniform noise on the unit square with ``lines`` noisy segments hidden in it.

    Segment 1 runs from (0.1, 0.1) to (0.9, 0.9), segment 2 from (0.1, 0.9) to
    (0.9, 0.1); line points are uniform along the segment with Gaussian
    perpendicular jitter.

    ``n_noise=None`` tops the cloud up to ``CLUTTER_TOTAL`` points, so one-line
    and two-line clouds have the same size and cannot be told apart by their
    vertex count alone.
    """
    if n_noise is None:
        n_noise = max(CLUTTER_TOTAL - lines * n_line, 0)
    if n_noise < 0 or n_line < 0 or jitter < 0:
        raise ValueError("counts and jitter must be non-negative")
    if lines not in (0, 1, 2):
        raise ValueError("lines must be 0, 1 or 2")
    rng = make_rng(seed)
    parts = [rng.uniform(size=(n_noise, 2))]
    for a, b in CLUTTER_SEGMENTS[:lines]:
        a, b = np.asarray(a), np.asarray(b)
        direction = b - a
        normal = np.array([-direction[1], direction[0]]) / np.linalg.norm(direction)
        s = rng.uniform(size=(n_line, 1))
        offset = rng.normal(0.0, jitter, size=(n_line, 1)) if jitter > 0 else np.zeros((n_line, 1))
        parts.append(a + s * direction + offset * normal)
    return np.vstack(parts)


@dataclass
class MCResult:
    sizes: list[int]
    samples: list[np.ndarray]  # one (R, ...) array per size

    @property
    def mean(self) -> list[np.ndarray]:
        return [s.mean(axis=0) for s in self.samples]

    @property
    def var(self) -> list[np.ndarray]:
        return [s.var(axis=0, ddof=1) for s in self.samples]


def rescale(points: np.ndarray, n: int, regime: str | None, alpha: float = 0.5) -> np.ndarray:
    """Scaling-regime hook: ``critical`` multiplies by ``n^(1/d)``, ``sparse``
    divides by ``r_n = n^-alpha`` with ``alpha > 1/d`` expected."""
    if regime is None:
        return points
    d = points.shape[1] if points.ndim == 2 else 1
    if regime == "critical":
        return points * n ** (1.0 / d)
    if regime == "sparse":
        return points * n**alpha
    raise ValueError(f"unknown regime {regime!r}")


def mc_harness(generator: Callable[[int, np.random.Generator], np.ndarray],
               descriptor: Callable[[np.ndarray], np.ndarray],
               replications: int, sizes: Sequence[int], seed: int = 0,
               regime: str | None = None, alpha: float = 0.5) -> MCResult:
    """Replicate ``descriptor(rescale(generator(n, rng)))`` for every size.

    Replication ``r`` at size index ``i`` draws from ``make_rng(seed, i, r)``,
    so results do not depend on evaluation order.
    """
    if replications < 2:
        raise ValueError("need at least two replications for a variance")
    samples = []
    for i, n in enumerate(sizes):
        rows = []
        for r in range(replications):
            pts = generator(int(n), make_rng(seed, i, r))
            rows.append(np.asarray(descriptor(rescale(pts, int(n), regime, alpha)), dtype=float))
        samples.append(np.stack(rows))
    return MCResult([int(n) for n in sizes], samples)

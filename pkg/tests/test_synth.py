import numpy as np
import pytest

from eulerist.synth import (
    make_rng,
    mc_harness,
    orbit,
    rejection_torus_angles,
    rescale,
    sample_clutter,
    sample_orbit,
    sample_poisson,
    sample_sphere,
    sample_torus,
)


def test_orbit_recursion_uses_fresh_x():
    P = orbit(0.2, 0.3, 3.5, 2)
    assert P[1, 0] == pytest.approx(0.935, abs=1e-15)
    assert P[1, 1] == pytest.approx(0.5127125, abs=1e-15)


def test_orbit_sampler_deterministic_and_in_unit_square():
    a, b = sample_orbit(4.3, 300, 7), sample_orbit(4.3, 300, 7)
    assert np.array_equal(a, b)
    assert np.all((a >= 0) & (a < 1))
    assert not np.array_equal(a, sample_orbit(4.3, 300, 8))
    with pytest.raises(ValueError):
        sample_orbit(0.0, 10, 1)


def test_make_rng_is_philox_and_keyed():
    g = make_rng(5, 1, 2)
    assert isinstance(g.bit_generator, np.random.Philox)
    assert make_rng(5, 1, 2).uniform() == make_rng(5, 1, 2).uniform() != make_rng(5, 2, 1).uniform()
    with pytest.raises(ValueError):
        make_rng(-1)


def test_poisson_counts():
    counts = [len(sample_poisson(20.0, 1.5, 2, seed)) for seed in range(1000)]
    lam = 20.0 * 1.5**2
    assert abs(np.mean(counts) - lam) < 3 * np.sqrt(lam / 1000)
    P = sample_poisson(20.0, 1.5, 2, 3)
    assert np.all((P >= 0) & (P <= 1.5))
    assert len(sample_poisson(20.0, 0.0, 2, 3)) == 0


@pytest.mark.parametrize("uniform", [True, False])
def test_torus_and_sphere_identities(uniform):
    T = sample_torus(500, uniform, 1)
    assert np.max(np.abs((np.hypot(T[:, 0], T[:, 1]) - 2) ** 2 + T[:, 2] ** 2 - 1)) < 1e-12
    S = sample_sphere(500, uniform, 1)
    assert np.max(np.abs(np.linalg.norm(S, axis=1) - 1)) < 1e-12


def test_torus_rejection_acceptance_rate():
    theta, _, proposals = rejection_torus_angles(20000, make_rng(3))
    assert len(theta) == 20000
    assert 20000 / proposals == pytest.approx(2 / 3, abs=0.01)


def test_clutter_generator():
    noise = sample_clutter(n_noise=50, n_line=0, lines=0, seed=1)
    assert noise.shape == (50, 2) and np.all((noise >= 0) & (noise <= 1))
    P = sample_clutter(n_noise=0, n_line=40, lines=2, jitter=0.0, seed=1)
    assert np.allclose(P[:40, 0], P[:40, 1])
    assert np.allclose(P[40:, 0] + P[40:, 1], 1.0)
    assert np.all((P >= 0.1 - 1e-12) & (P <= 0.9 + 1e-12))


def test_mc_harness_constant_generator_has_zero_variance():
    res = mc_harness(lambda n, rng: np.zeros((n, 2)), lambda P: np.array([len(P), 1.0]), 5, [3, 4])
    assert all(np.all(v == 0) for v in res.var)
    assert res.mean[1].tolist() == [4.0, 1.0]


def test_mc_harness_order_invariant():
    gen = lambda n, rng: rng.uniform(size=(n, 1))
    a = mc_harness(gen, lambda P: P.mean(keepdims=True), 10, [5, 20], seed=3)
    b = mc_harness(gen, lambda P: P.mean(keepdims=True), 10, [20, 5][::-1], seed=3)
    assert np.array_equal(a.samples[0], b.samples[0])
    # replication samples do not depend on their evaluation order
    assert np.allclose(a.var[0], np.var(a.samples[0][::-1], axis=0, ddof=1))


def test_rescale_regimes():
    P = np.ones((4, 2))
    assert np.allclose(rescale(P, 100, "critical"), 10.0)
    assert np.allclose(rescale(P, 100, "sparse", alpha=1.0), 100.0)
    assert rescale(P, 100, None) is P

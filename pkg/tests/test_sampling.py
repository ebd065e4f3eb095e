import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from polycert import InputError, SampleConfig, decompose, parse_problem
from polycert.sampling import (
    clopper_pearson,
    estimate_alpha,
    required_samples,
    residual_probability,
    resolve_threads,
    sample_direction,
    sample_directions,
    scan_samples,
)

QUARTIC = parse_problem("dim 2\nobjective: x1^4 - x2^4\n")


def _reference_direction(seed, index, n):
    """Scalar Box-Muller on the raw Philox words for one index."""
    blocks = (2 * ((n + 1) // 2) + 3) // 4
    words = np.random.Philox(key=seed, counter=[index * blocks, 0, 0, 0]).random_raw(4 * blocks)
    z = []
    for j in range((n + 1) // 2):
        u1 = 1.0 - int(words[2 * j] >> np.uint64(11)) * 2.0**-53
        u2 = int(words[2 * j + 1] >> np.uint64(11)) * 2.0**-53
        r = math.sqrt(-2.0 * math.log(u1))
        z += [r * math.cos(2 * math.pi * u2), r * math.sin(2 * math.pi * u2)]
    z = np.array(z[:n])
    return z / np.linalg.norm(z)


def test_golden_vectors():
    # frozen outputs of the stream; a change here breaks report reproducibility
    np.testing.assert_array_equal(sample_direction(42, 0, 2),
                                  [0.37252743332534843, 0.9280211804802885])
    np.testing.assert_array_equal(sample_direction(42, 7, 3),
                                  [0.5977581623266814, 0.8011923131145448, 0.02785779564133279])


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 10])
def test_matches_scalar_reference(n):
    for seed in (0, 1, 2**64 - 1):
        for idx in (0, 1, 17, 10_000):
            np.testing.assert_allclose(sample_direction(seed, idx, n),
                                       _reference_direction(seed, idx, n), rtol=1e-14, atol=1e-15)


def test_batch_is_index_addressable():
    D = sample_directions(7, 0, 300, 5)
    np.testing.assert_array_equal(D[123], sample_direction(7, 123, 5))
    np.testing.assert_array_equal(sample_directions(7, 100, 300, 5), D[100:])
    np.testing.assert_allclose(np.linalg.norm(D, axis=1), 1.0, rtol=1e-15)


def test_seed_validation():
    with pytest.raises(InputError):
        sample_direction(-1, 0, 2)
    with pytest.raises(InputError):
        sample_direction(2**64, 0, 2)
    with pytest.raises(InputError):
        sample_direction(0, -1, 2)


def test_uniform_angle_chi_square():
    D = sample_directions(3, 0, 36_000, 2)
    theta = np.arctan2(D[:, 1], D[:, 0])
    counts, _ = np.histogram(theta, bins=36, range=(-np.pi, np.pi))
    assert stats.chisquare(counts).pvalue > 1e-3


def test_uniform_height_on_two_sphere():
    # Archimedes: z is uniform on [-1, 1] for uniform points on S^2
    D = sample_directions(4, 0, 36_000, 3)
    counts, _ = np.histogram(D[:, 2], bins=36, range=(-1, 1))
    assert stats.chisquare(counts).pvalue > 1e-3


def test_required_samples_exact():
    assert required_samples(0.1, 0.01) == 44
    assert required_samples(0.01, 0.001) == 688
    with pytest.raises(InputError):
        required_samples(0.0, 0.1)
    with pytest.raises(InputError):
        required_samples(0.5, 1.0)


def test_residual_probability():
    assert residual_probability(0.25, 16) == pytest.approx(0.75**16, rel=1e-12)
    assert residual_probability(0.1, 1000) == pytest.approx(0.9**1000, rel=1e-12)
    assert residual_probability(0.3, 0) == 1.0
    assert residual_probability(1.0, 5) == 0.0


def test_residual_monotone():
    alphas = [0.001, 0.01, 0.05, 0.1, 0.3, 0.5]
    for a in alphas:
        vals = [residual_probability(a, N) for N in range(0, 50)]
        assert all(x > y for x, y in zip(vals, vals[1:]))
    for N in (1, 10, 100):
        vals = [residual_probability(a, N) for a in alphas]
        assert all(x > y for x, y in zip(vals, vals[1:]))


def test_required_samples_consistency():
    for a in (0.01, 0.02, 0.05, 0.1, 0.2, 0.5):
        for d in (0.001, 0.005, 0.01, 0.05, 0.1):
            N = required_samples(a, d)
            assert residual_probability(a, N) <= d
            assert N == 1 or residual_probability(a, N - 1) > d


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-4, 0.99), st.floats(1e-9, 0.99))
def test_required_samples_minimal(a, d):
    N = required_samples(a, d)
    assert residual_probability(a, N) <= d
    assert N == 1 or residual_probability(a, N - 1) > d


def test_clopper_pearson():
    lo, hi = clopper_pearson(0, 100)
    assert lo == 0.0 and hi == pytest.approx(1 - 0.025 ** (1 / 100), rel=1e-9)
    lo, hi = clopper_pearson(100, 100)
    assert hi == 1.0 and lo == pytest.approx(0.025 ** (1 / 100), rel=1e-9)
    lo, hi = clopper_pearson(50, 100)
    # published value for 50/100
    assert lo == pytest.approx(0.3983, abs=1e-4) and hi == pytest.approx(0.6017, abs=1e-4)


def test_sample_config_validation():
    with pytest.raises(InputError):
        SampleConfig(count=0)
    with pytest.raises(InputError):
        SampleConfig(seed=-3)
    with pytest.raises(InputError):
        SampleConfig(delta=1.5)


def test_resolve_threads(monkeypatch):
    monkeypatch.delenv("CERTIFY_THREADS", raising=False)
    assert resolve_threads(3) == 3
    assert resolve_threads(0) >= 1
    monkeypatch.setenv("CERTIFY_THREADS", "2")
    assert resolve_threads(8) == 2
    monkeypatch.setenv("CERTIFY_THREADS", "x")
    with pytest.raises(InputError):
        resolve_threads(1)


@pytest.mark.parametrize("threads", [1, 2, 8])
def test_scan_independent_of_threads(threads):
    decs = [decompose(g) for g in QUARTIC.polynomials]
    ref = scan_samples(decs, 9, 50_000, stop_at_first=False, chunk_size=1000)
    got = scan_samples(decs, 9, 50_000, threads=threads, stop_at_first=False, chunk_size=1000)
    assert got.hits == ref.hits
    first = scan_samples(decs, 9, 50_000, threads=threads, chunk_size=1000)
    assert first.hits == ref.hits[:1]


def test_estimate_alpha_quartic():
    est = estimate_alpha(QUARTIC, SampleConfig(count=10_000, seed=0))
    assert abs(est.alpha_hat - 0.5) <= 0.02
    lo, hi = est.interval
    assert lo <= est.alpha_hat <= hi

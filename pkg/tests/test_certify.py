import math

import numpy as np
import pytest

from polycert import (
    InputError,
    ProbeConfig,
    SampleConfig,
    Tolerance,
    certificate_check,
    classify,
    classify_robustness,
    decompose,
    parse_problem,
    polynomial,
    run_certificate,
    verify_ray,
)
from polycert.certify import RESIDUAL_GRID, Inconclusive, Unbounded

from conftest import random_unit

DIAG = np.array([1.0, 1.0]) / math.sqrt(2.0)


def prob(text):
    return parse_problem(text)


QUARTIC = prob("dim 2\nobjective: x1^4 - x2^4\n")
BOWL = prob("dim 2\nobjective: x1^2 + x2^2\n")


def test_example_user_direction(example_problem):
    out = run_certificate(example_problem, SampleConfig(count=1000), extra_directions=[(1, 1)])
    assert isinstance(out, Unbounded)
    assert out.source == "user" and out.sample_index == "user"
    np.testing.assert_allclose(out.direction, DIAG, rtol=1e-15)
    assert [p.mu for p in out.profiles] == [3, 4, 2]
    np.testing.assert_allclose([p.leading_value for p in out.profiles],
                               [-1 / (2 * math.sqrt(2)), -0.25, -1.0], rtol=1e-12)
    assert out.witness_T == pytest.approx(2.0, rel=1e-12)
    assert out.robustness.vanishing_indices == (0,)
    assert str(out.robustness) == "degenerate{0}"


def test_example_sampling_inconclusive(example_problem):
    out = run_certificate(example_problem, SampleConfig(count=100_000, seed=1))
    assert isinstance(out, Inconclusive)
    assert [a for a, _ in out.residual_table] == list(RESIDUAL_GRID)
    assert out.residual(0.001) == pytest.approx(0.999**100_000, rel=1e-9)


def test_quartic_seed_one_robust():
    out = run_certificate(QUARTIC, SampleConfig(count=64, seed=1))
    assert isinstance(out, Unbounded) and out.source == "sample"
    assert out.robustness.robust
    # the reported index is the first certifying one in the stream
    from polycert import sample_direction

    for i in range(out.index):
        d = sample_direction(1, i, 2)
        assert not certificate_check([classify(decompose(QUARTIC.objective), d)])


def test_bowl_residual_table():
    out = run_certificate(BOWL, SampleConfig(count=1000))
    assert isinstance(out, Inconclusive)
    assert out.residual(0.1) == pytest.approx(0.9**1000, rel=1e-12)


def test_user_alpha_floor_added():
    out = run_certificate(BOWL, SampleConfig(count=10, alpha_floor=0.3))
    assert out.residual(0.3) == pytest.approx(0.7**10)
    with pytest.raises(InputError):
        run_certificate(BOWL, SampleConfig(count=10), alpha_floors=[0.0])


def test_direction_validation(example_problem):
    with pytest.raises(InputError):
        run_certificate(example_problem, extra_directions=[(0, 0)])
    with pytest.raises(InputError):
        run_certificate(example_problem, extra_directions=[(1, 1, 1)])


def test_user_directions_in_order():
    p = prob("dim 2\nobjective: -x1 - x2\n")
    out = run_certificate(p, extra_directions=[(-1, 0), (0, 3), (1, 0)])
    assert out.source == "user" and out.index == 1
    np.testing.assert_allclose(out.direction, [0.0, 1.0])


def test_user_before_samples():
    out = run_certificate(QUARTIC, SampleConfig(count=64, seed=1), extra_directions=[(0, 1)])
    assert out.source == "user"


def test_robustness_examples(example_problem):
    decs = [decompose(g) for g in example_problem.polynomials]
    assert classify_robustness(decs, DIAG).vanishing_indices == (0,)
    assert classify_robustness([decompose(QUARTIC.objective)], np.array([0.0, 1.0])).robust
    lin = prob("dim 2\nobjective: -x1\n")
    assert classify_robustness([decompose(lin.objective)], np.array([1.0, 0.0])).robust


def test_decomposition_once_per_polynomial(monkeypatch, example_problem):
    calls = []
    real = polynomial.decompose

    def counting(p):
        calls.append(p)
        return real(p)

    monkeypatch.setattr(polynomial, "decompose", counting)
    run_certificate(example_problem, SampleConfig(count=20_000), probe=ProbeConfig(restarts=4))
    assert len(calls) == example_problem.m + 1


def test_determinism_across_threads():
    p = prob("dim 3\nobjective: x1^4 - x2^4 + x3\nconstraint: x3^3 - x1*x2 - 2\n")
    outs = [run_certificate(p, SampleConfig(count=50_000, seed=5), threads=t) for t in (1, 2, 8)]
    assert len({(o.verdict, getattr(o, "index", None)) for o in outs}) == 1
    ex = [run_certificate(p, SampleConfig(count=50_000, seed=5), threads=t, exhaustive=True)
          for t in (1, 8)]
    assert ex[0].stats.hits == ex[1].stats.hits


def test_exhaustive_reports_first_and_all_hits():
    out = run_certificate(QUARTIC, SampleConfig(count=2000, seed=3), exhaustive=True)
    assert out.index == out.stats.hits[0]
    assert abs(len(out.stats.hits) / 2000 - 0.5) < 0.05


def test_probe_failure_degrades_to_inconclusive(monkeypatch, example_problem):
    import polycert.certify as certify_mod

    def boom(*a, **k):
        raise RuntimeError("no convergence")

    monkeypatch.setattr(certify_mod, "find_candidates", boom)
    out = run_certificate(example_problem, SampleConfig(count=100), probe=ProbeConfig())
    assert isinstance(out, Inconclusive)
    assert any("probe failed" in n for n in out.stats.notes)


def test_bogus_probe_candidates_never_certify(monkeypatch, example_problem):
    import polycert.certify as certify_mod

    monkeypatch.setattr(certify_mod, "find_candidates",
                        lambda *a, **k: [np.array([1.0, 0.0]), np.array([0.0, -1.0])])
    out = run_certificate(example_problem, SampleConfig(count=100), probe=ProbeConfig())
    assert isinstance(out, Inconclusive)


def test_probe_rescues_example(example_problem):
    out = run_certificate(example_problem, SampleConfig(count=1000, seed=0), probe=ProbeConfig())
    assert isinstance(out, Unbounded) and out.source == "probe"
    assert abs(abs(out.direction[0]) - DIAG[0]) < 1e-6 and out.direction[1] > 0
    assert any("heuristic" in n for n in out.stats.notes)


def test_robust_implies_neighborhood():
    rng = np.random.default_rng(31)
    problems = [
        QUARTIC,
        prob("dim 2\nobjective: x2^4 - x1^4\nconstraint: x2^2 - x1^2 - 1\n"),
        prob("dim 3\nobjective: -x1^3 + x2^2\nconstraint: x3^2 - x1^2\n"),
    ]
    for p in problems:
        out = run_certificate(p, SampleConfig(count=500, seed=2))
        assert isinstance(out, Unbounded) and out.robustness.robust
        decs = [decompose(g) for g in p.polynomials]
        for _ in range(100):
            d = out.direction + 1e-4 * random_unit(rng, p.dimension)
            d /= np.linalg.norm(d)
            assert certificate_check([classify(dec, d) for dec in decs])


def test_soundness_on_corpus(corpus_files):
    from polycert import load_problem

    for path in corpus_files:
        p = load_problem(path)
        out = run_certificate(p, SampleConfig(count=5000), probe=ProbeConfig(restarts=8))
        if isinstance(out, Unbounded):
            assert verify_ray(p, out.direction, out.witness_T), path.name


def test_tolerance_flag_for_user_direction():
    # the cubic coefficient along (1, 0) is 3e-14: declared zero at abs 1e-14, within 10x
    p = prob("dim 2\nobjective: 3e-14*x1^3 + x1^2\n")
    out = run_certificate(p, SampleConfig(count=10), Tolerance(1e-13, 0.0),
                          extra_directions=[(1, 0)])
    assert isinstance(out, Inconclusive)
    assert out.tolerance_flags and out.tolerance_flags[0].source == "user"

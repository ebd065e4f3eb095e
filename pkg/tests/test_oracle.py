import math

import numpy as np
import pytest

from polycert import (
    GridSpec,
    InputError,
    SampleConfig,
    estimate_alpha,
    grid_alpha,
    parse_problem,
    verify_ray,
)

DIAG = np.array([1.0, 1.0]) / math.sqrt(2.0)


def prob(obj, *cons, n=2):
    return parse_problem(f"dim {n}\nobjective: {obj}\n" + "".join(f"constraint: {c}\n" for c in cons))


def test_grid_alpha_examples():
    assert grid_alpha(prob("x1^4 - x2^4")) == pytest.approx(0.5, abs=1e-4)
    assert grid_alpha(prob("x1^2 + x2^2")) == 0.0
    assert grid_alpha(prob("-x1")) == pytest.approx(0.5, abs=1e-4)
    assert grid_alpha(prob("-x1", "-x2")) == pytest.approx(0.25, abs=1e-4)


def test_grid_alpha_three_dimensions():
    # -x3 certifies on the open upper hemisphere
    assert grid_alpha(prob("-x3", n=3), GridSpec(3, 200)) == pytest.approx(0.5, abs=1e-3)
    # x3 < -|x1|... cone z > 1/sqrt(2) radially: cap of height 1 - 1/sqrt(2)
    cap = prob("-x3", "x1^2 + x2^2 - x3^2", n=3)
    assert grid_alpha(cap, GridSpec(3, 400)) == pytest.approx((1 - 1 / math.sqrt(2)) / 2, abs=2e-3)


def test_grid_spec_validation():
    with pytest.raises(InputError):
        GridSpec(4)
    with pytest.raises(InputError):
        GridSpec(2, 4)
    with pytest.raises(InputError):
        grid_alpha(prob("x1"), GridSpec(3))


@pytest.mark.parametrize("text,alpha", [
    ("x1^2 + x2^2", 0.0),
    ("-x1\nconstraint: -x2", 0.25),
    ("x1^4 - x2^4", 0.5),
])
def test_grid_agrees_with_monte_carlo(text, alpha):
    p = parse_problem(f"dim 2\nobjective: {text}\n")
    g = grid_alpha(p)
    mc = estimate_alpha(p, SampleConfig(count=100_000, seed=1)).alpha_hat
    assert abs(g - alpha) <= 1e-3
    assert abs(g - mc) <= 0.01


def test_verify_ray_examples(example_problem):
    assert verify_ray(example_problem, DIAG, 2.0)
    bad = verify_ray(example_problem, np.array([1.0, 0.0]), 2.0)
    # f(t, 0) = t^4 fails first; g1(t, 0) = t^4 would fail too
    assert not bad and bad.violation == (0, 2.0)
    grows = verify_ray(prob("x1^2"), np.array([1.0, 0.0]), 1.0)
    assert not grows and grows.violation[0] == 0


def test_verify_ray_requires_decrease():
    # constant negative objective: negative everywhere but not decreasing
    flat = verify_ray(prob("-1"), np.array([1.0, 0.0]), 1.0)
    assert not flat and flat.violation[0] == -1


def test_verify_ray_input_errors(example_problem):
    with pytest.raises(InputError):
        verify_ray(example_problem, [1.0, 1.0], 2.0)
    with pytest.raises(InputError):
        verify_ray(example_problem, DIAG, 0.0)

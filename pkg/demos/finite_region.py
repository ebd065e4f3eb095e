"""Finite-region indistinguishability.

On the diagonal example, any brute-force search restricted to a ball
``||x|| <= R`` returns a finite minimum, while the directional certificate
shows the problem is unbounded below.  The objective's quartic part is
non-negative and vanishes only on the diagonals, so the cubic descent wins
only exactly along ``x2 = |x1|``.  Growing the ball just deepens a finite
minimum; nothing at fixed radius separates this from a bounded problem.

Run as a script::

    python demos/finite_region.py [--radius 10] [--grid 2001]
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from polycert import SampleConfig, load_problem, run_certificate

PROBLEM = Path(__file__).resolve().parent.parent / "corpus" / "diagonal_example.pop"


def grid_minimum(problem, radius: float, resolution: int):
    """Minimum of the objective over feasible grid points with ``||x|| <= radius``.

    Returns ``(value, point, feasible_count)``; value is ``inf`` if no grid point is feasible.
    """
    axis = np.linspace(-radius, radius, resolution)
    X1, X2 = np.meshgrid(axis, axis, indexing="ij")
    P = np.column_stack([X1.ravel(), X2.ravel()])
    P = P[np.einsum("ij,ij->i", P, P) <= radius * radius]
    mask = np.ones(len(P), dtype=bool)
    for g in problem.constraints:
        mask &= g.evaluate_many(P) <= 0.0
    if not mask.any():
        return np.inf, None, 0
    F = problem.objective.evaluate_many(P[mask])
    k = int(np.argmin(F))
    return float(F[k]), P[mask][k], int(mask.sum())


def run(radius: float = 10.0, resolution: int = 2001, problem_path=PROBLEM) -> dict:
    problem = load_problem(problem_path)
    value, point, feasible = grid_minimum(problem, radius, resolution)
    outcome = run_certificate(problem, SampleConfig(count=1000, seed=0),
                              extra_directions=[(1.0, 1.0)])
    return {
        "radius": radius,
        "grid_minimum": value,
        "argmin": None if point is None else point.tolist(),
        "feasible_points": feasible,
        "verdict": outcome.verdict,
        "direction": np.asarray(outcome.direction).tolist() if outcome.verdict == "unbounded" else None,
        "witness_T": getattr(outcome, "witness_T", None),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--radius", type=float, default=10.0)
    ap.add_argument("--grid", type=int, default=2001, help="grid points per axis")
    args = ap.parse_args(argv)
    for r in sorted({args.radius, 2 * args.radius, 4 * args.radius}):
        res = run(r, args.grid)
        print(f"R = {r:6g}: grid minimum {res['grid_minimum']:.6g} over "
              f"{res['feasible_points']} feasible points, at {res['argmin']}")
    print(f"certificate: {res['verdict'].upper()} along {res['direction']}, "
          f"witness T = {res['witness_T']}")


if __name__ == "__main__":
    main()

"""Brute-force cross-checks: grid measurement of the certifying fraction and
direct evaluation along a claimed descent ray."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .asymptotics import Tolerance, certify_many
from .errors import InputError
from .polynomial import decompose

RAY_MULTIPLIERS = (1.0, 2.0, 10.0, 100.0, 1000.0)


@dataclass(frozen=True)
class GridSpec:
    dimension: int
    resolution: int | None = None

    def __post_init__(self):
        if self.dimension not in (2, 3):
            raise InputError(f"grid oracle supports n = 2 or 3, got n = {self.dimension}")
        if self.resolution is None:
            object.__setattr__(self, "resolution", 100_000 if self.dimension == 2 else 1000)
        if self.resolution < 8:
            raise InputError(f"grid resolution must be at least 8, got {self.resolution}")


def grid_points(spec: GridSpec):
    """Yield blocks of equal-measure grid points on the circle or 2-sphere."""
    R = spec.resolution
    if spec.dimension == 2:
        theta = 2.0 * np.pi * (np.arange(R) + 0.5) / R
        yield np.column_stack([np.cos(theta), np.sin(theta)])
        return
    # Archimedes: equal-height bands of the sphere have equal area
    phi = 2.0 * np.pi * (np.arange(R) + 0.5) / R
    cos_phi, sin_phi = np.cos(phi), np.sin(phi)
    for i in range(R):
        z = -1.0 + (2 * i + 1) / R
        rho = math.sqrt(max(0.0, 1.0 - z * z))
        yield np.column_stack([rho * cos_phi, rho * sin_phi, np.full(R, z)])


def grid_alpha(problem, spec: GridSpec | None = None, tol: Tolerance = Tolerance()) -> float:
    """Fraction of an equal-measure grid on the sphere that certifies."""
    spec = spec or GridSpec(problem.dimension)
    if spec.dimension != problem.dimension:
        raise InputError(f"grid dimension {spec.dimension} != problem dimension {problem.dimension}")
    decs = [decompose(g) for g in problem.polynomials]
    hits = total = 0
    for block in grid_points(spec):
        ok, _ = certify_many(decs, block, tol)
        hits += int(ok.sum())
        total += len(block)
    return hits / total


@dataclass(frozen=True)
class RayCheck:
    ok: bool
    violation: tuple[int, float] | None = None  # (polynomial index, t); index -1 for monotonicity
    message: str = ""

    def __bool__(self):
        return self.ok


def _exact_value(p, x: list[Fraction]) -> Fraction:
    total = Fraction(0)
    for exps, c in p.terms.items():
        term = Fraction(c)
        for xi, e in zip(x, exps):
            if e:
                term *= xi**e
        total += term
    return total


def verify_ray(problem, d, T: float) -> RayCheck:
    """Evaluate every polynomial along ``t d`` for ``t`` in ``T * (1, 2, 10, 100, 1000)``.

    Passes when all values are strictly negative and the objective strictly
    decreases over the last three points.  Evaluation is exact in rational
    arithmetic on the given floats, so rounding and overflow play no part.
    """
    d = np.asarray(d, dtype=float).ravel()
    if abs(np.linalg.norm(d) - 1.0) > 1e-12:
        raise InputError("verify_ray needs a unit direction")
    if not (T > 0 and math.isfinite(T * RAY_MULTIPLIERS[-1])):
        raise InputError(f"T must be positive and finite, got {T!r}")
    f_vals = []
    dq = [Fraction(float(v)) for v in d]
    for mult in RAY_MULTIPLIERS:
        t = T * mult
        x = [Fraction(t) * v for v in dq]
        for i, g in enumerate(problem.polynomials):
            v = _exact_value(g, x)
            if not v < 0:
                return RayCheck(False, (i, t), f"g{i}({t:g} d) = {float(v):g} is not negative")
            if i == 0:
                f_vals.append(v)
    last = f_vals[-3:]
    if not (last[0] > last[1] > last[2]):
        return RayCheck(False, (-1, T * RAY_MULTIPLIERS[-1]),
                        f"objective not decreasing: {[float(v) for v in last]}")
    return RayCheck(True)

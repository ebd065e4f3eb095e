"""Asymptotic sign of a polynomial along a direction.

Along a ray ``t -> h(t d)`` a polynomial is the univariate polynomial
``sum_k c_k t^k`` with ``c_k = phi_k(d)``.  The highest index whose
coefficient is not declared zero (``mu``) and the sign of that coefficient
decide whether ``h(td)/t`` tends to ``-inf``, a finite slope, or ``+inf``.

A coefficient is declared zero when ``|c_k| <= abs + rel * s_k(d)`` with
``s_k(d) = sum |coef| * |d^alpha|`` over the terms of ``phi_k``.  That sum
bounds the rounding error of evaluating ``phi_k(d)`` and never exceeds the
coefficient 1-norm on the unit sphere, so a value that is small only
because ``d`` is close to an axis still counts as nonzero.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ContractError, InputError
from .polynomial import NO_DEGREE, HomogeneousDecomposition, part_magnitudes, restrict_to_ray

UNIT_TOL = 1e-12
#: A declared-zero coefficient this close to the threshold is reported.
NEAR_ZERO_FACTOR = 10.0


@dataclass(frozen=True)
class Tolerance:
    """Zero-test tolerances for ray coefficients.

    ``rel`` multiplies the evaluation-error scale ``sum |coef| |d^alpha|``;
    the default is about 45 ulps of it.  ``abs`` is an optional floor and
    also the margin a finite slope must clear.  It defaults to 0 because
    any fixed floor swallows genuine small values near coordinate axes.
    """

    abs: float = 0.0
    rel: float = 1e-14

    def __post_init__(self):
        if not (self.abs >= 0 and self.rel >= 0) or math.isinf(self.abs) or math.isinf(self.rel):
            raise InputError(f"tolerances must be finite and non-negative, got {self}")

    def thresholds(self, magnitudes) -> np.ndarray:
        return self.abs + self.rel * np.asarray(magnitudes, dtype=float)


class SignKind(enum.Enum):
    NEG_INFINITY = "-inf"
    FINITE = "finite"
    POS_INFINITY = "+inf"


@dataclass(frozen=True)
class AsymptoticSign:
    kind: SignKind
    value: float | None = None  # set only for FINITE

    @classmethod
    def finite(cls, value: float) -> "AsymptoticSign":
        return cls(SignKind.FINITE, float(value))

    def __str__(self):
        if self.kind is SignKind.FINITE:
            return f"finite({self.value:.6g})"
        return self.kind.value


NEG_INFINITY = AsymptoticSign(SignKind.NEG_INFINITY)
POS_INFINITY = AsymptoticSign(SignKind.POS_INFINITY)


@dataclass(frozen=True)
class NearZero:
    """A coefficient above ``mu`` that was declared zero by a narrow margin."""

    degree: int
    magnitude: float
    threshold: float


@dataclass(frozen=True)
class DirectionalProfile:
    mu: int | float  # NO_DEGREE when every coefficient is declared zero
    leading_value: float
    ray_coefficients: tuple[float, ...]
    sign: AsymptoticSign
    thresholds: tuple[float, ...] = field(default=(), repr=False)
    near_zero: tuple[NearZero, ...] = ()
    margin: float = field(default=0.0, repr=False)

    @property
    def certifies(self) -> bool:
        return _sign_certifies(self.sign, self.margin)


def _sign_for(mu, leading) -> AsymptoticSign:
    if mu == NO_DEGREE or mu <= 0:
        return AsymptoticSign.finite(0.0)
    if mu == 1:
        return AsymptoticSign.finite(leading)
    return NEG_INFINITY if leading < 0 else POS_INFINITY


def _sign_certifies(sign: AsymptoticSign, margin: float) -> bool:
    if sign.kind is SignKind.NEG_INFINITY:
        return True
    if sign.kind is SignKind.FINITE:
        return sign.value < -margin
    return False


def check_unit(d, dimension: int | None = None) -> np.ndarray:
    d = np.asarray(d, dtype=float).ravel()
    if dimension is not None and d.shape[0] != dimension:
        raise InputError(f"direction has length {d.shape[0]}, expected {dimension}")
    norm = float(np.linalg.norm(d))
    if abs(norm - 1.0) > UNIT_TOL:
        raise InputError(f"direction must be a unit vector (norm {norm!r})")
    return d


def normalize(d) -> np.ndarray:
    d = np.asarray(d, dtype=float).ravel()
    norm = float(np.linalg.norm(d))
    if norm == 0.0 or not math.isfinite(norm):
        raise InputError("direction must be nonzero and finite")
    return d / norm


def classify(dec: HomogeneousDecomposition, d: Sequence[float],
             tol: Tolerance = Tolerance()) -> DirectionalProfile:
    """Profile of one polynomial at the unit direction ``d``."""
    d = check_unit(d, dec.dimension)
    c = restrict_to_ray(dec, d)
    thr = tol.thresholds(part_magnitudes(dec, d))
    nonzero = np.abs(c) > thr
    idx = np.nonzero(nonzero)[0]
    if idx.size:
        mu = int(idx[-1])
        leading = float(c[mu])
    else:
        mu, leading = NO_DEGREE, 0.0
    near = tuple(
        NearZero(k, float(abs(c[k])), float(thr[k]))
        for k in range(len(c))
        if (mu == NO_DEGREE or k > mu) and c[k] != 0.0 and abs(c[k]) * NEAR_ZERO_FACTOR > thr[k]
    )
    return DirectionalProfile(
        mu=mu,
        leading_value=leading,
        ray_coefficients=tuple(float(v) for v in c),
        sign=_sign_for(mu, leading),
        thresholds=tuple(float(t) for t in thr),
        near_zero=near,
        margin=float(tol.abs),
    )


def certificate_check(profiles: Sequence[DirectionalProfile], tol: Tolerance = Tolerance()) -> bool:
    """True iff every polynomial tends to ``-inf`` or has a negative slope.

    ``profiles`` holds the objective first, then the constraints, all taken
    at the same direction.  A finite slope must be below ``-tol.abs``.
    """
    return all(_sign_certifies(p.sign, tol.abs) for p in profiles)


def witness_threshold(profile: DirectionalProfile) -> float:
    """Radius beyond which the ray restriction stays strictly negative.

    Cauchy's bound: every real root of ``sum_{k<=mu} c_k t^k`` has modulus
    below ``1 + max_{k<mu} |c_k / c_mu|``.
    """
    sign = profile.sign
    negative = sign.kind is SignKind.NEG_INFINITY or (
        sign.kind is SignKind.FINITE and profile.mu == 1 and sign.value < 0
    )
    if not negative:
        raise ContractError(f"witness threshold requested for a non-negative sign ({sign})")
    c = profile.ray_coefficients
    lead = abs(c[profile.mu])
    ratios = [abs(c[k]) / lead for k in range(profile.mu)]
    return 1.0 + max(ratios, default=0.0)


# batch versions used by the samplers


@dataclass
class BatchProfile:
    """Vectorized profile of one polynomial over ``N`` directions."""

    mu: np.ndarray  # int, -1 when nothing survives the zero test
    leading: np.ndarray
    certifies: np.ndarray  # bool
    near_zero: np.ndarray  # bool, a declared zero above mu within NEAR_ZERO_FACTOR


def classify_many(dec: HomogeneousDecomposition, directions: np.ndarray,
                  tol: Tolerance = Tolerance()) -> BatchProfile:
    c, scale = dec.compiled().ray_coefficients_and_magnitudes_many(directions)  # (N, p+1)
    thr = tol.thresholds(scale)
    mag = np.abs(c)
    nonzero = mag > thr
    width = c.shape[1]
    # highest nonzero column, -1 when none
    rev = nonzero[:, ::-1]
    any_nz = rev.any(axis=1)
    mu = np.where(any_nz, width - 1 - rev.argmax(axis=1), -1)
    rows = np.arange(c.shape[0])
    leading = np.where(any_nz, c[rows, np.maximum(mu, 0)], 0.0)
    certifies = ((mu >= 2) & (leading < 0)) | ((mu == 1) & (leading < -tol.abs))
    above = np.arange(width)[None, :] > mu[:, None]
    near = (above & ~nonzero & (mag * NEAR_ZERO_FACTOR > thr) & (c != 0.0)).any(axis=1)
    return BatchProfile(mu, leading, certifies, near)


def certify_many(decs: Sequence[HomogeneousDecomposition], directions: np.ndarray,
                 tol: Tolerance = Tolerance()) -> tuple[np.ndarray, np.ndarray]:
    """Certificate mask and near-threshold mask for a block of unit directions."""
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    ok = np.ones(directions.shape[0], dtype=bool)
    near = np.zeros(directions.shape[0], dtype=bool)
    for dec in decs:
        prof = classify_many(dec, directions, tol)
        ok &= prof.certifies
        near |= prof.near_zero
    return ok, near

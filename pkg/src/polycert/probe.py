"""Heuristic search of measure-zero certificate strata.

Uniform sampling never lands on a certifying direction whose leading
(full-degree) forms vanish, because the zero set of a nonzero form has
measure zero on the sphere.  For a subset ``S`` of the polynomials the
probe minimizes

    sum_{i in S} phi_i(d)^2 + sum_{i not in S} max(0, phi_i(d) + margin)^2

over the unit sphere, where ``phi_i`` is the full-degree form of ``g_i``.
Zeros of this penalty are directions where the forms in ``S`` vanish and
all others are strictly negative.  Each terminal point is polished by
Gauss-Newton steps on the equations ``phi_i(d) = 0, i in S`` so that the
vanishing forms fall below the zero-test threshold.

Nothing here certifies anything.  Candidates go through the same
certificate check as sampled directions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .asymptotics import check_unit
from .errors import InputError
from .polynomial import CompiledTerms, HomogeneousDecomposition
from .sampling import sample_directions

_PROBE_STREAM = 0x9E3779B97F4A7C15
DEDUP_ANGLE = 1e-6
_ROW_BUDGET = 4_000_000  # rows x monomials per batched evaluation


@dataclass(frozen=True)
class ProbeConfig:
    restarts: int = 32
    max_iterations: int = 500
    initial_step: float = 0.1
    convergence_tol: float = 1e-14
    subset_cap: int = 10
    margin: float = 1e-6
    polish_iterations: int = 100

    def __post_init__(self):
        for name in ("restarts", "max_iterations", "subset_cap"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise InputError(f"probe {name} must be a positive integer, got {value!r}")
        for name in ("initial_step", "convergence_tol", "margin"):
            if not getattr(self, name) > 0:
                raise InputError(f"probe {name} must be positive, got {getattr(self, name)!r}")
        if not isinstance(self.polish_iterations, int) or self.polish_iterations < 0:
            raise InputError("probe polish_iterations must be a non-negative integer")


class FormBank:
    """Leading forms of ``g_0..g_m`` and their gradients, evaluated together."""

    def __init__(self, decs: Sequence[HomogeneousDecomposition]):
        self.dimension = n = decs[0].dimension
        self.count = len(decs)
        polys = []
        for dec in decs:
            top = dec.top_form
            polys.append(top)
            polys.extend(top.derivative(j) for j in range(1, n + 1))
        index: dict[tuple[int, ...], int] = {}
        for p in polys:
            for e in p.terms:
                index.setdefault(e, len(index))
        exps = np.array(list(index), dtype=np.int64).reshape(-1, n)
        weights = np.zeros((len(index), len(polys)))
        for col, p in enumerate(polys):
            for e, c in p.terms.items():
                weights[index[e], col] = c
        self._terms = CompiledTerms(n, exps, np.ones(len(index)))
        self.size = len(index)
        self._weights = weights

    def evaluate(self, D: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Form values ``(R, F)`` and gradients ``(R, F, n)``."""
        D = np.atleast_2d(D)
        R, n = D.shape
        if not len(self._weights):
            return np.zeros((R, self.count)), np.zeros((R, self.count, n))
        out = (self._terms.monomials(D).T @ self._weights).reshape(R, self.count, n + 1)
        return out[:, :, 0], out[:, :, 1:]


def _mask(subset, count) -> np.ndarray:
    mask = np.zeros(count, dtype=bool)
    mask[list(subset)] = True
    return mask


def _row_masks(subset, rows: int, count: int) -> np.ndarray:
    """``(rows, count)`` membership mask; ``subset`` may already be one."""
    if isinstance(subset, np.ndarray) and subset.dtype == bool:
        return np.broadcast_to(subset, (rows, count))
    return np.broadcast_to(_mask(subset, count), (rows, count))


def _penalty_and_gradient(bank: FormBank, in_subset: np.ndarray, D: np.ndarray, margin: float):
    # in_subset is (count,) or (R, count)
    vals, grads = bank.evaluate(D)
    resid = np.where(in_subset, vals, np.maximum(0.0, vals + margin))
    pen = np.sum(resid**2, axis=1)
    grad = 2.0 * np.einsum("rf,rfn->rn", resid, grads)
    return pen, grad


def penalty(decs: Sequence[HomogeneousDecomposition], subset, d, margin: float = 1e-6) -> float:
    """Stratum penalty at the unit direction ``d`` (0 on the target stratum)."""
    d = check_unit(d, decs[0].dimension)
    bank = FormBank(decs)
    pen, _ = _penalty_and_gradient(bank, _mask(subset, len(decs)), d[None, :], margin)
    return float(pen[0])


def tangential_gradient(decs, subset, d, margin: float = 1e-6) -> np.ndarray:
    """``(I - d d^T) grad penalty`` at the unit direction ``d``."""
    d = check_unit(d, decs[0].dimension)
    bank = FormBank(decs)
    _, g = _penalty_and_gradient(bank, _mask(subset, len(decs)), d[None, :], margin)
    g = g[0]
    return g - (g @ d) * d


def _normalize_rows(X):
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def descend(bank: FormBank, subset, starts: np.ndarray, config: ProbeConfig,
            history: list | None = None):
    """Projected gradient descent from each row of ``starts``.

    Returns final directions and penalties.  When ``history`` is a list it
    receives the penalty vector after every iteration.
    """
    D = _normalize_rows(np.array(starts, dtype=float))
    in_subset = _row_masks(subset, len(D), bank.count)
    P, G = _penalty_and_gradient(bank, in_subset, D, config.margin)
    eta = np.full(len(D), config.initial_step)
    active = P > config.convergence_tol
    slow = np.zeros(len(D), dtype=int)
    if history is not None:
        history.append(P.copy())
    for _ in range(config.max_iterations):
        if not active.any():
            break
        Gt = G - np.sum(G * D, axis=1, keepdims=True) * D
        gnorm = np.linalg.norm(Gt, axis=1)
        active &= gnorm > 0
        # let the step grow, but never move more than one radian at once
        step = np.minimum(2.0 * eta, 1.0 / np.maximum(gnorm, 1e-300))
        pending = active.copy()
        D_new, P_new, G_new = D.copy(), P.copy(), G.copy()
        for _ in range(50):
            if not pending.any():
                break
            rows = np.nonzero(pending)[0]
            trial = _normalize_rows(D[rows] - step[rows, None] * Gt[rows])
            pt, gt = _penalty_and_gradient(bank, in_subset[rows], trial, config.margin)
            ok = pt < P[rows]
            acc = rows[ok]
            D_new[acc], P_new[acc], G_new[acc] = trial[ok], pt[ok], gt[ok]
            pending[acc] = False
            step[rows[~ok]] *= 0.5
        # rows that never found a decrease have stalled
        active &= ~pending
        moved = active.copy()
        decrease = P - P_new
        slow = np.where(moved & (decrease <= 1e-8 * P), slow + 1, 0)
        D, P, G = D_new, P_new, G_new
        eta = np.where(moved, step, eta)
        active &= (P > config.convergence_tol) & (slow < 5)
        if history is not None:
            history.append(P.copy())
    return D, P


def polish(bank: FormBank, subset, D: np.ndarray, P: np.ndarray, config: ProbeConfig):
    """Gauss-Newton refinement of the equations ``phi_i(d) = 0`` for ``i`` in ``subset``.

    ``subset`` is an index collection or a per-row ``(R, count)`` mask.
    """
    in_subset = _row_masks(subset, len(D), bank.count)
    if config.polish_iterations == 0:
        return D, P
    D, P = D.copy(), P.copy()
    active = in_subset.any(axis=1)
    for _ in range(config.polish_iterations):
        rows = np.nonzero(active & (P > 0))[0]
        if not rows.size:
            break
        vals, grads = bank.evaluate(D[rows])
        m = in_subset[rows]
        r = np.where(m, vals, 0.0)  # (R, F); rows outside the subset drop out
        J = np.where(m[:, :, None], grads, 0.0)  # (R, F, n)
        d = D[rows]
        J = J - np.einsum("rsn,rn->rs", J, d)[:, :, None] * d[:, None, :]
        step = -np.einsum("rns,rs->rn", np.linalg.pinv(J, rcond=1e-12), r)
        trial = _normalize_rows(d + step)
        pt, _ = _penalty_and_gradient(bank, m, trial, config.margin)
        ok = pt < P[rows]
        D[rows[ok]], P[rows[ok]] = trial[ok], pt[ok]
        active[rows[~ok]] = False
    return D, P


def subsets_for(count: int, cap: int):
    """Index subsets of ``range(count)`` explored by the probe."""
    idx = range(count)
    if count <= cap:
        return [c for k in range(count + 1) for c in itertools.combinations(idx, k)]
    return [()] + [(i,) for i in idx] + [tuple(idx)]


def _angle(a, b) -> float:
    return 2.0 * np.arcsin(min(1.0, np.linalg.norm(a - b) / 2.0))


def find_candidates(decs: Sequence[HomogeneousDecomposition], config: ProbeConfig = ProbeConfig(),
                    seed: int = 0) -> list[np.ndarray]:
    """Directions where some stratum penalty is numerically zero.

    Every subset gets its own ``config.restarts`` random starts drawn from a
    stream derived from ``seed``.  The result is deduplicated and sorted
    lexicographically.  It may be empty.
    """
    bank = FormBank(decs)
    n = bank.dimension
    key = (seed ^ _PROBE_STREAM) % 2**64
    subsets = subsets_for(bank.count, config.subset_cap)
    # all subsets descend together in groups sized to bound the monomial table
    per_group = max(1, _ROW_BUDGET // max(1, bank.size * config.restarts))
    found: list[np.ndarray] = []
    for g0 in range(0, len(subsets), per_group):
        group = subsets[g0:g0 + per_group]
        starts = sample_directions(key, g0 * config.restarts,
                                   (g0 + len(group)) * config.restarts, n)
        masks = np.repeat(np.array([_mask(s, bank.count) for s in group]), config.restarts, axis=0)
        D, P = descend(bank, masks, starts, config)
        D, P = polish(bank, masks, D, P, config)
        for d in D[P <= config.convergence_tol]:
            if all(_angle(d, e) > DEDUP_ANGLE for e in found):
                found.append(d)
    return sorted(found, key=lambda v: tuple(v))

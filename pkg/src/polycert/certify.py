"""Directional certificate driver.

Candidate directions are tried in a fixed precedence: user-supplied
directions in the order given, then sampled directions by ascending index,
then probe candidates.  The first direction along which the objective and
every constraint tend to ``-inf`` (or have a negative linear slope) proves
``inf f = -inf`` over the feasible set; the run then reports that
direction, a radius ``T`` beyond which the ray is feasible with negative
objective, and whether the certificate is robust.

A direction is *robust* when every full-degree form is strictly negative
there.  Then a whole neighborhood on the sphere certifies and random
sampling finds it with positive probability.  Otherwise it is
*degenerate*: it sits on the zero set of some leading form.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import polynomial
from .asymptotics import (
    DirectionalProfile,
    NearZero,
    Tolerance,
    certificate_check,
    classify,
    normalize,
    witness_threshold,
)
from .errors import InputError
from .probe import ProbeConfig, find_candidates
from .sampling import SampleConfig, residual_probability, sample_direction, scan_samples

log = logging.getLogger(__name__)

RESIDUAL_GRID = (0.1, 0.05, 0.01, 0.001)


@dataclass(frozen=True)
class Robustness:
    """``vanishing_indices`` lists polynomials whose leading form is not
    strictly negative at the direction (0 is the objective)."""

    vanishing_indices: tuple[int, ...] = ()

    @property
    def robust(self) -> bool:
        return not self.vanishing_indices

    def __str__(self):
        if self.robust:
            return "robust"
        return "degenerate{" + ", ".join(map(str, self.vanishing_indices)) + "}"


ROBUST = Robustness()


@dataclass(frozen=True)
class ToleranceFlag:
    """Directions where a coefficient was declared zero within 10x of the threshold."""

    source: str  # "user" or "sample"
    count: int
    examples: tuple[int, ...] = ()
    details: tuple[tuple[int, NearZero], ...] = ()  # (polynomial index, flag), user directions only


@dataclass(frozen=True)
class RunStats:
    decompositions: int
    directions_checked: int
    decomposition_ms: float
    sampling_ms: float
    probe_ms: float = 0.0
    probe_candidates: int | None = None
    notes: tuple[str, ...] = ()
    hits: tuple[int, ...] | None = None  # exhaustive mode only


@dataclass(frozen=True)
class Unbounded:
    direction: np.ndarray
    source: str  # "user", "sample" or "probe"
    index: int
    profiles: tuple[DirectionalProfile, ...]
    witness_T: float
    robustness: Robustness
    stats: RunStats | None = field(default=None, compare=False)

    verdict = "unbounded"

    @property
    def sample_index(self):
        return self.index if self.source == "sample" else self.source


@dataclass(frozen=True)
class Inconclusive:
    samples_used: int
    residual_table: tuple[tuple[float, float], ...]
    tolerance_flags: tuple[ToleranceFlag, ...] = ()
    stats: RunStats | None = field(default=None, compare=False)

    verdict = "inconclusive"

    def residual(self, alpha_floor: float) -> float:
        for a, r in self.residual_table:
            if a == alpha_floor:
                return r
        raise KeyError(alpha_floor)


def classify_robustness(decs: Sequence[polynomial.HomogeneousDecomposition], d,
                        tol: Tolerance = Tolerance()) -> Robustness:
    """Which full-degree forms fail to be strictly negative at ``d``.

    Uses the full degree ``p_i`` of each polynomial, not ``mu_i(d)``.
    """
    d = np.asarray(d, dtype=float)
    vanishing = []
    for i, dec in enumerate(decs):
        if not dec.parts:
            vanishing.append(i)
            continue
        k = dec.max_degree
        value = polynomial.evaluate(dec.top_form, d)
        threshold = tol.abs + tol.rel * polynomial.part_magnitudes(dec, d)[k]
        if not value < -threshold:
            vanishing.append(i)
    return Robustness(tuple(vanishing))


def _profiles(decs, d, tol):
    return tuple(classify(dec, d, tol) for dec in decs)


def _unbounded(decs, d, source, index, profiles, tol, stats=None) -> Unbounded:
    return Unbounded(
        direction=d,
        source=source,
        index=index,
        profiles=profiles,
        witness_T=max(witness_threshold(p) for p in profiles),
        robustness=classify_robustness(decs, d, tol),
        stats=stats,
    )


def run_certificate(problem, config: SampleConfig = SampleConfig(), tol: Tolerance = Tolerance(),
                    extra_directions: Sequence | None = None, probe: ProbeConfig | None = None,
                    *, threads: int = 1, exhaustive: bool = False,
                    alpha_floors: Sequence[float] = ()) -> Unbounded | Inconclusive:
    """Search for a direction certifying that ``problem`` is unbounded below.

    Parameters
    ----------
    problem : Problem
    config : SampleConfig
        ``count`` uniform directions from stream ``seed``.
    tol : Tolerance
        Zero test for ray coefficients.
    extra_directions : sequence of vectors, optional
        Checked first; normalized here.
    probe : ProbeConfig, optional
        Enables the degenerate-stratum search after sampling fails.
    threads : int
        Worker threads for the sampling scan; never changes the result.
    exhaustive : bool
        Scan all samples and record every certifying index.
    alpha_floors : sequence of float
        Extra rows for the residual table.

    Returns
    -------
    Unbounded or Inconclusive
    """
    n = problem.dimension
    user_dirs = []
    for k, v in enumerate(extra_directions or ()):
        v = np.asarray(v, dtype=float).ravel()
        if v.shape[0] != n:
            raise InputError(f"direction #{k + 1} has length {v.shape[0]}, problem dimension is {n}")
        try:
            user_dirs.append(normalize(v))
        except InputError:
            raise InputError(f"direction #{k + 1} is zero or not finite") from None
    floors = list(RESIDUAL_GRID)
    for a in list(alpha_floors) + ([config.alpha_floor] if config.alpha_floor else []):
        if not 0.0 < a <= 1.0:
            raise InputError(f"alpha floor must lie in (0, 1], got {a!r}")
        if a not in floors:
            floors.append(a)

    t0 = time.perf_counter()
    decs = [polynomial.decompose(g) for g in problem.polynomials]
    decomposition_ms = (time.perf_counter() - t0) * 1e3
    checked = 0
    notes: list[str] = []

    def stats(sampling_ms, probe_ms=0.0, probe_candidates=None, hits=None):
        return RunStats(len(decs), checked, decomposition_ms, sampling_ms, probe_ms,
                        probe_candidates, tuple(notes), hits)

    found = None
    user_flags = []
    for k, d in enumerate(user_dirs):
        profiles = _profiles(decs, d, tol)
        checked += 1
        if certificate_check(profiles, tol):
            found = (d, "user", k, profiles)
            break
        details = tuple((i, nz) for i, p in enumerate(profiles) for nz in p.near_zero)
        if details:
            user_flags.append((k, details))

    t1 = time.perf_counter()
    hits = None
    near_count, near_examples = 0, []
    if exhaustive:
        scan = scan_samples(decs, config.seed, config.count, tol, threads=threads,
                            stop_at_first=False)
        checked += config.count
        hits = tuple(scan.hits)
        near_count, near_examples = scan.near_count, scan.near_examples
        if found is None:
            for i in scan.hits:
                d = sample_direction(config.seed, i, n)
                profiles = _profiles(decs, d, tol)
                if certificate_check(profiles, tol):
                    found = (d, "sample", i, profiles)
                    break
    elif found is None:
        start = 0
        while start < config.count:
            scan = scan_samples(decs, config.seed, config.count, tol, threads=threads,
                                start=start)
            checked += scan.scanned - start
            near_count += scan.near_count
            near_examples.extend(scan.near_examples[: 10 - len(near_examples)])
            if not scan.hits:
                break
            i = scan.hits[0]
            d = sample_direction(config.seed, i, n)
            profiles = _profiles(decs, d, tol)
            if certificate_check(profiles, tol):
                found = (d, "sample", i, profiles)
                break
            # batch and scalar evaluation disagree at the threshold; trust scalar
            log.debug("sample %d rejected by scalar re-check", i)
            checked -= scan.scanned - (i + 1)
            start = i + 1
    sampling_ms = (time.perf_counter() - t1) * 1e3

    if found is not None:
        d, source, index, profiles = found
        return _unbounded(decs, d, source, index, profiles, tol, stats(sampling_ms, hits=hits))

    probe_ms = 0.0
    n_candidates = None
    if probe is not None:
        notes.append("probe enabled: heuristic search of degenerate strata; "
                     "its candidates pass the same certificate check as samples")
        t2 = time.perf_counter()
        try:
            candidates = find_candidates(decs, probe, seed=config.seed)
        except Exception as exc:  # noqa: BLE001 - probe is best effort
            log.warning("probe failed: %s", exc)
            notes.append(f"probe failed: {type(exc).__name__}: {exc}")
            candidates = []
        n_candidates = len(candidates)
        for k, d in enumerate(candidates):
            d = normalize(d)
            profiles = _profiles(decs, d, tol)
            checked += 1
            if certificate_check(profiles, tol):
                probe_ms = (time.perf_counter() - t2) * 1e3
                return _unbounded(decs, d, "probe", k, profiles, tol,
                                  stats(sampling_ms, probe_ms, n_candidates, hits))
        probe_ms = (time.perf_counter() - t2) * 1e3
        notes.append("probe found no certifying candidate; this says nothing about boundedness")

    flags = []
    if user_flags:
        flags.append(ToleranceFlag("user", len(user_flags), tuple(k for k, _ in user_flags),
                                   tuple(x for _, det in user_flags for x in det)))
    if near_count:
        flags.append(ToleranceFlag("sample", near_count, tuple(near_examples)))
    table = tuple((a, residual_probability(a, config.count)) for a in floors)
    return Inconclusive(config.count, table, tuple(flags),
                        stats(sampling_ms, probe_ms, n_candidates, hits))



"""Uniform directions on the sphere and the sample-size calculus.

Direction ``i`` of stream ``seed`` is built from Philox4x64 output at a
fixed counter offset (``i * blocks_per_index``), turned into standard
normals by Box-Muller and normalized.  Because each index owns its own
counter range, the vector depends only on ``(seed, index, n)``; blocks of
indices can be generated in any order or on any number of threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

from .asymptotics import Tolerance, certify_many
from .errors import InputError
from .polynomial import HomogeneousDecomposition, decompose

SEED_LIMIT = 2**64
CHUNK_SIZE = 8192
_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SampleConfig:
    count: int = 10_000
    seed: int = 0
    delta: float | None = None
    alpha_floor: float | None = None

    def __post_init__(self):
        if not isinstance(self.count, (int, np.integer)) or self.count < 1:
            raise InputError(f"sample count must be a positive integer, got {self.count!r}")
        _check_seed(self.seed)
        if self.delta is not None and not 0.0 < self.delta < 1.0:
            raise InputError(f"delta must lie in (0, 1), got {self.delta!r}")
        if self.alpha_floor is not None and not 0.0 < self.alpha_floor <= 1.0:
            raise InputError(f"alpha floor must lie in (0, 1], got {self.alpha_floor!r}")


def _check_seed(seed):
    if not isinstance(seed, (int, np.integer)) or not 0 <= seed < SEED_LIMIT:
        raise InputError(f"seed must be an unsigned 64-bit integer, got {seed!r}")


def _blocks_per_index(n: int) -> int:
    # two uniforms per normal pair, four 64-bit words per Philox block
    pairs = (n + 1) // 2
    return (2 * pairs + 3) // 4


def sample_directions(seed: int, start: int, stop: int, n: int) -> np.ndarray:
    """Directions ``start..stop-1`` of the stream, shape ``(stop - start, n)``."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InputError(f"dimension must be at least 1, got {n!r}")
    _check_seed(seed)
    if start < 0 or stop < start:
        raise InputError(f"invalid index range [{start}, {stop})")
    count = stop - start
    if count == 0:
        return np.empty((0, n))
    blocks = _blocks_per_index(n)
    gen = np.random.Philox(key=int(seed), counter=[start * blocks, 0, 0, 0])
    raw = gen.random_raw(count * blocks * 4).reshape(count, blocks * 4)
    pairs = (n + 1) // 2
    u = (raw[:, : 2 * pairs] >> np.uint64(11)).astype(float) * 2.0**-53
    u1 = 1.0 - u[:, 0::2]  # (0, 1]
    u2 = u[:, 1::2]
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.empty((count, 2 * pairs))
    z[:, 0::2] = r * np.cos(_TWO_PI * u2)
    z[:, 1::2] = r * np.sin(_TWO_PI * u2)
    z = z[:, :n]
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def sample_direction(seed: int, index: int, n: int) -> np.ndarray:
    """Unit vector number ``index`` of the stream keyed by ``seed``."""
    if not isinstance(index, (int, np.integer)) or index < 0:
        raise InputError(f"index must be a non-negative integer, got {index!r}")
    return sample_directions(seed, int(index), int(index) + 1, n)[0]


def required_samples(alpha: float, delta: float) -> int:
    """Smallest ``N`` with ``(1 - alpha)**N <= delta``."""
    if not 0.0 < alpha < 1.0:
        raise InputError(f"alpha must lie in (0, 1), got {alpha!r}")
    if not 0.0 < delta < 1.0:
        raise InputError(f"delta must lie in (0, 1), got {delta!r}")
    n = max(1, math.ceil(math.log(delta) / math.log1p(-alpha)))
    # guard the ceiling against one-ulp error in the log ratio
    while n > 1 and residual_probability(alpha, n - 1) <= delta:
        n -= 1
    while residual_probability(alpha, n) > delta:
        n += 1
    return n


def residual_probability(alpha_floor: float, n: int) -> float:
    """``(1 - alpha_floor)**n``: chance that ``n`` uniform draws all miss."""
    if not 0.0 < alpha_floor <= 1.0:
        raise InputError(f"alpha floor must lie in (0, 1], got {alpha_floor!r}")
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise InputError(f"sample count must be a non-negative integer, got {n!r}")
    if n == 0:
        return 1.0
    if alpha_floor == 1.0:
        return 0.0
    return math.exp(n * math.log1p(-alpha_floor))


def clopper_pearson(hits: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    """Exact binomial interval for a proportion."""
    if n < 1 or not 0 <= hits <= n:
        raise InputError(f"need 0 <= hits <= n and n >= 1, got hits={hits}, n={n}")
    a = 1.0 - confidence
    lo = 0.0 if hits == 0 else float(stats.beta.ppf(a / 2, hits, n - hits + 1))
    hi = 1.0 if hits == n else float(stats.beta.ppf(1 - a / 2, hits + 1, n - hits))
    return lo, hi


def resolve_threads(threads: int | None) -> int:
    """Worker count: ``CERTIFY_THREADS`` wins, then ``threads``; 0 means all cores."""
    env = os.environ.get("CERTIFY_THREADS")
    if env not in (None, ""):
        try:
            threads = int(env)
        except ValueError:
            raise InputError(f"CERTIFY_THREADS must be an integer, got {env!r}") from None
    threads = 1 if threads is None else threads
    if threads < 0:
        raise InputError(f"thread count must be non-negative, got {threads}")
    return threads or (os.cpu_count() or 1)


@dataclass
class ScanResult:
    """Outcome of checking sampled directions ``0..scanned-1``."""

    hits: list[int]  # sorted; only the first hit when stopping early
    scanned: int
    near_count: int = 0
    near_examples: list[int] = field(default_factory=list)


def _scan_chunk(decs, seed, n, start, stop, tol):
    D = sample_directions(seed, start, stop, n)
    ok, near = certify_many(decs, D, tol)
    return start + np.nonzero(ok)[0], start + np.nonzero(near & ~ok)[0]


def scan_samples(decs: Sequence[HomogeneousDecomposition], seed: int, count: int,
                 tol: Tolerance = Tolerance(), *, threads: int = 1,
                 stop_at_first: bool = True, chunk_size: int = CHUNK_SIZE,
                 start: int = 0) -> ScanResult:
    """Run the certificate check over sampled directions ``start..count-1``.

    With ``stop_at_first`` the scan ends at the lowest certifying index.
    Chunks are dispatched in waves of ``threads``; results are reduced in
    index order, so the answer is the same for any worker count.
    """
    n = decs[0].dimension
    bounds = [(a, min(a + chunk_size, count)) for a in range(start, count, chunk_size)]
    hits: list[int] = []
    near_count = 0
    near_examples: list[int] = []
    scanned = start

    def consume(results, wave):
        nonlocal near_count, scanned
        for (a, b), (h, nz) in zip(wave, results):
            hits.extend(int(i) for i in h)
            near_count += len(nz)
            near_examples.extend(int(i) for i in nz[: max(0, 10 - len(near_examples))])
            scanned = b

    if threads <= 1:
        for a, b in bounds:
            consume([_scan_chunk(decs, seed, n, a, b, tol)], [(a, b)])
            if stop_at_first and hits:
                break
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for w in range(0, len(bounds), threads):
                wave = bounds[w:w + threads]
                results = list(pool.map(lambda ab: _scan_chunk(decs, seed, n, *ab, tol), wave))
                if stop_at_first:
                    # keep only chunks up to and including the first with a hit
                    for j, (h, _) in enumerate(results):
                        if len(h):
                            results, wave = results[: j + 1], wave[: j + 1]
                            break
                consume(results, wave)
                if stop_at_first and hits:
                    break
    if stop_at_first and hits:
        hits = [min(hits)]
    return ScanResult(sorted(hits), scanned, near_count, near_examples)


@dataclass(frozen=True)
class AlphaEstimate:
    hits: int
    samples: int
    alpha_hat: float
    interval: tuple[float, float]


def estimate_alpha(problem, config: SampleConfig, tol: Tolerance = Tolerance(), *,
                   threads: int = 1, decompositions=None) -> AlphaEstimate:
    """Monte Carlo estimate of the certifying fraction of the sphere."""
    decs = decompositions or [decompose(g) for g in problem.polynomials]
    scan = scan_samples(decs, config.seed, config.count, tol, threads=threads,
                        stop_at_first=False)
    hits = len(scan.hits)
    return AlphaEstimate(hits, config.count, hits / config.count,
                         clopper_pearson(hits, config.count))

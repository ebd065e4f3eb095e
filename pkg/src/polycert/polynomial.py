"""Sparse multivariate polynomials over the reals.

A :class:`Polynomial` maps exponent tuples to nonzero float coefficients.
Terms are kept in graded-lexicographic order (highest degree first) so
equality, hashing and printing are deterministic.  Objects are immutable.

Besides single-point evaluation, the module provides a compiled batch
evaluator used by the samplers: monomials are evaluated for a whole block
of directions at once and grouped by total degree with one matrix product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InputError

#: Degree reported for the zero polynomial and for an empty decomposition.
NO_DEGREE = float("-inf")


def _grlex_key(exponents):
    return (-sum(exponents), tuple(-e for e in exponents))


@dataclass(frozen=True)
class Monomial:
    """A power product ``x1^e1 * ... * xn^en``."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        if any((not isinstance(e, (int, np.integer))) or e < 0 for e in self.exponents):
            raise InputError(f"exponents must be non-negative integers, got {self.exponents}")
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))

    @property
    def dimension(self) -> int:
        return len(self.exponents)

    @property
    def degree(self) -> int:
        return sum(self.exponents)


class Polynomial:
    """Immutable sparse polynomial in ``dimension`` variables ``x1..xn``.

    Parameters
    ----------
    dimension : int
        Number of variables, at least 1.
    terms : mapping or iterable of pairs, optional
        ``{exponents: coefficient}``.  Like terms given as pairs are summed;
        coefficients that are exactly zero are dropped.  Tiny nonzero
        coefficients are kept as given.
    """

    __slots__ = ("_dimension", "_terms", "_hash", "_compiled")

    def __init__(self, dimension: int, terms: Mapping | Iterable | None = None):
        if not isinstance(dimension, (int, np.integer)) or dimension < 1:
            raise InputError(f"dimension must be a positive integer, got {dimension!r}")
        dimension = int(dimension)
        acc: dict[tuple[int, ...], float] = {}
        items = terms.items() if isinstance(terms, Mapping) else (terms or ())
        for exps, coef in items:
            exps = Monomial(tuple(exps)).exponents
            if len(exps) != dimension:
                raise InputError(
                    f"exponent vector {exps} has length {len(exps)}, expected {dimension}"
                )
            acc[exps] = acc.get(exps, 0.0) + float(coef)
        ordered = sorted((e for e, c in acc.items() if c != 0.0), key=_grlex_key)
        self._dimension = dimension
        self._terms = MappingProxyType({e: acc[e] for e in ordered})
        self._hash = None
        self._compiled = None

    @classmethod
    def _trusted(cls, dimension: int, acc: dict) -> "Polynomial":
        # acc already has valid, unique exponent tuples of the right length
        self = cls.__new__(cls)
        ordered = sorted((e for e, c in acc.items() if c != 0.0), key=_grlex_key)
        self._dimension = dimension
        self._terms = MappingProxyType({e: float(acc[e]) for e in ordered})
        self._hash = None
        self._compiled = None
        return self

    # construction helpers

    @classmethod
    def constant(cls, value: float, dimension: int) -> "Polynomial":
        return cls(dimension, {(0,) * dimension: value})

    @classmethod
    def variable(cls, index: int, dimension: int) -> "Polynomial":
        """The coordinate polynomial ``x_index`` (1-based, as in ``x1``)."""
        if not 1 <= index <= dimension:
            raise InputError(f"variable x{index} out of range for dimension {dimension}")
        exps = [0] * dimension
        exps[index - 1] = 1
        return cls(dimension, {tuple(exps): 1.0})

    # basic properties

    @property
    def dimension(self) -> int:
        return self._dimension

    @property
    def terms(self) -> Mapping[tuple[int, ...], float]:
        """Read-only view of ``{exponents: coefficient}`` in grlex order."""
        return self._terms

    def monomials(self) -> list[Monomial]:
        return [Monomial(e) for e in self._terms]

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self):
        """Total degree, or ``NO_DEGREE`` for the zero polynomial."""
        if not self._terms:
            return NO_DEGREE
        return sum(next(iter(self._terms)))

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self._terms}) <= 1

    def coefficient_norm1(self) -> float:
        return math.fsum(abs(c) for c in self._terms.values())

    # arithmetic

    def _check_compatible(self, other: "Polynomial"):
        if other._dimension != self._dimension:
            raise InputError(
                f"dimension mismatch: {self._dimension} vs {other._dimension}"
            )

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            self._check_compatible(other)
            return other
        if isinstance(other, (int, float, np.integer, np.floating)):
            return Polynomial.constant(float(other), self._dimension)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self._terms)
        for e, c in other._terms.items():
            acc[e] = acc.get(e, 0.0) + c
        return Polynomial._trusted(self._dimension, acc)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._trusted(self._dimension, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[tuple[int, ...], float] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0.0) + c1 * c2
        return Polynomial._trusted(self._dimension, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise InputError(f"polynomial powers must be non-negative integers, got {k!r}")
        result = Polynomial.constant(1.0, self._dimension)
        base = self
        k = int(k)
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._dimension == other._dimension and dict(self._terms) == dict(other._terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._dimension, tuple(self._terms.items())))
        return self._hash

    # calculus

    def derivative(self, index: int) -> "Polynomial":
        """Partial derivative with respect to ``x_index`` (1-based)."""
        if not 1 <= index <= self._dimension:
            raise InputError(f"variable x{index} out of range for dimension {self._dimension}")
        j = index - 1
        out = {}
        for e, c in self._terms.items():
            if e[j]:
                e2 = list(e)
                e2[j] -= 1
                out[tuple(e2)] = c * e[j]
        return Polynomial(self._dimension, out)

    # evaluation

    def _check_point(self, x) -> list[float]:
        x = [float(v) for v in np.asarray(x, dtype=float).ravel()]
        if len(x) != self._dimension:
            raise InputError(
                f"point has length {len(x)}, polynomial dimension is {self._dimension}"
            )
        return x

    def __call__(self, x) -> float:
        return evaluate(self, x)

    def compiled(self) -> "CompiledTerms":
        if self._compiled is None:
            self._compiled = CompiledTerms.from_polynomial(self)
        return self._compiled

    def evaluate_many(self, points) -> np.ndarray:
        """Evaluate at every row of an ``(N, n)`` array."""
        return self.compiled().evaluate_many(points)

    # printing

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({self._dimension}, {dict(self._terms)!r})"


def _format_coefficient(c: float) -> str:
    if c.is_integer() and abs(c) < 1e15:
        return str(int(c))
    return repr(c)


def format_polynomial(p: Polynomial) -> str:
    """Canonical text form, accepted back by the expression parser."""
    if p.is_zero():
        return "0"
    pieces = []
    for exps, coef in p.terms.items():
        factors = []
        for j, e in enumerate(exps, start=1):
            if e == 1:
                factors.append(f"x{j}")
            elif e > 1:
                factors.append(f"x{j}^{e}")
        mag = abs(coef)
        if not factors:
            body = _format_coefficient(mag)
        elif mag == 1.0:
            body = "*".join(factors)
        else:
            body = "*".join([_format_coefficient(mag)] + factors)
        sign = "-" if coef < 0 else "+"
        pieces.append((sign, body))
    first_sign, first_body = pieces[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


class CompiledTerms:
    """Array form of a term list for evaluating many points at once.

    ``exponents`` is ``(T, n)``, ``coefficients`` and ``degrees`` are ``(T,)``.
    """

    def __init__(self, dimension: int, exponents: np.ndarray, coefficients: np.ndarray):
        self.dimension = dimension
        self.exponents = np.asarray(exponents, dtype=np.int64).reshape(-1, dimension)
        self.coefficients = np.asarray(coefficients, dtype=float)
        self.degrees = self.exponents.sum(axis=1)
        self.max_exponent = int(self.exponents.max()) if self.exponents.size else 0
        # variables that actually occur, with the rows that use them
        self._active = [
            (j, np.nonzero(self.exponents[:, j])[0]) for j in range(dimension)
            if self.exponents.size and self.exponents[:, j].any()
        ]

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> "CompiledTerms":
        exps = np.array(list(p.terms.keys()), dtype=np.int64).reshape(-1, p.dimension)
        coefs = np.array(list(p.terms.values()), dtype=float)
        return cls(p.dimension, exps, coefs)

    def monomials(self, points: np.ndarray) -> np.ndarray:
        """Monomial values, shape ``(T, N)``."""
        X = np.asarray(points, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.dimension:
            raise InputError(f"points must have shape (N, {self.dimension}), got {X.shape}")
        T, N = len(self.coefficients), X.shape[0]
        M = np.ones((T, N))
        if T == 0 or not self._active:
            return M
        powers = np.empty((self.max_exponent + 1, N))
        for j, rows in self._active:
            powers[0] = 1.0
            col = X[:, j]
            for e in range(1, self.max_exponent + 1):
                np.multiply(powers[e - 1], col, out=powers[e])
            M[rows] *= powers[self.exponents[rows, j]]
        return M

    def evaluate_many(self, points) -> np.ndarray:
        X = np.atleast_2d(np.asarray(points, dtype=float))
        if not len(self.coefficients):
            return np.zeros(X.shape[0])
        return self.coefficients @ self.monomials(X)


def evaluate(p: Polynomial, x: Sequence[float]) -> float:
    """Value of ``p`` at the point ``x``."""
    xs = p._check_point(x)
    return math.fsum(
        c * math.prod(xj**e for xj, e in zip(xs, exps) if e) for exps, c in p.terms.items()
    )


def gradient(p: Polynomial, x: Sequence[float]) -> np.ndarray:
    """Analytic gradient of ``p`` at ``x`` by the power rule."""
    xs = p._check_point(x)
    n = p.dimension
    grad = [[] for _ in range(n)]
    for exps, c in p.terms.items():
        for j in range(n):
            ej = exps[j]
            if not ej:
                continue
            val = c * ej * xs[j] ** (ej - 1)
            for k in range(n):
                if k != j and exps[k]:
                    val *= xs[k] ** exps[k]
            grad[j].append(val)
    return np.array([math.fsum(g) for g in grad])


class HomogeneousDecomposition:
    """Degree-indexed homogeneous parts of a polynomial.

    ``parts[k]`` is the nonzero degree-``k`` slice; absent degrees have no entry.
    """

    __slots__ = ("dimension", "parts", "_compiled")

    def __init__(self, dimension: int, parts: Mapping[int, Polynomial]):
        for k, part in parts.items():
            if part.is_zero():
                raise InputError(f"part of degree {k} is zero")
            if part.dimension != dimension:
                raise InputError("part dimension mismatch")
            if any(sum(e) != k for e in part.terms):
                raise InputError(f"part stored under degree {k} is not homogeneous of that degree")
        self.dimension = dimension
        self.parts = MappingProxyType(dict(sorted(parts.items())))
        self._compiled = None

    @property
    def max_degree(self):
        return max(self.parts) if self.parts else NO_DEGREE

    def part(self, k: int) -> Polynomial:
        """The degree-``k`` part, the zero polynomial when absent."""
        return self.parts.get(k, Polynomial(self.dimension))

    @property
    def top_form(self) -> Polynomial:
        """Full-degree part; zero polynomial for an empty decomposition."""
        return self.part(self.max_degree) if self.parts else Polynomial(self.dimension)

    def reassemble(self) -> Polynomial:
        terms = []
        for part in self.parts.values():
            terms.extend(part.terms.items())
        return Polynomial(self.dimension, terms)

    def compiled(self) -> "CompiledDecomposition":
        if self._compiled is None:
            self._compiled = CompiledDecomposition(self)
        return self._compiled

    def __repr__(self):
        body = ", ".join(f"{k}: {v}" for k, v in self.parts.items())
        return f"HomogeneousDecomposition({{{body}}})"


class CompiledDecomposition:
    """Batch evaluator for all ray coefficients ``c_k = phi_k(d)``.

    ``ray_coefficients_many(D)`` returns shape ``(N, p + 1)``.
    """

    def __init__(self, dec: HomogeneousDecomposition):
        self.dimension = dec.dimension
        self.max_degree = dec.max_degree if dec.parts else 0
        terms = []
        for part in dec.parts.values():
            terms.extend(part.terms.items())
        exps = np.array([e for e, _ in terms], dtype=np.int64).reshape(-1, dec.dimension)
        coefs = np.array([c for _, c in terms], dtype=float)
        self.terms = CompiledTerms(dec.dimension, exps, coefs)
        width = self.max_degree + 1
        weights = np.zeros((len(coefs), width))
        weights[np.arange(len(coefs)), self.terms.degrees] = coefs
        self.weights = weights
        self.abs_weights = np.abs(weights)

    def ray_coefficients_many(self, directions) -> np.ndarray:
        D = np.atleast_2d(np.asarray(directions, dtype=float))
        if not len(self.terms.coefficients):
            return np.zeros((D.shape[0], 1))
        return self.terms.monomials(D).T @ self.weights

    def ray_coefficients_and_magnitudes_many(self, directions):
        """``c_k(d)`` and ``sum |coef| |d^alpha|`` over the terms of each part."""
        D = np.atleast_2d(np.asarray(directions, dtype=float))
        if not len(self.terms.coefficients):
            z = np.zeros((D.shape[0], 1))
            return z, z.copy()
        M = self.terms.monomials(D).T
        return M @ self.weights, np.abs(M) @ self.abs_weights


def decompose(p: Polynomial) -> HomogeneousDecomposition:
    """Group the terms of ``p`` by total degree."""
    groups: dict[int, list] = {}
    for exps, c in p.terms.items():
        groups.setdefault(sum(exps), []).append((exps, c))
    return HomogeneousDecomposition(
        p.dimension, {k: Polynomial(p.dimension, ts) for k, ts in groups.items()}
    )


def part_magnitudes(dec: HomogeneousDecomposition, d: Sequence[float]) -> np.ndarray:
    """``sum |coef| * |d^alpha|`` for each part: the scale of rounding error in ``c_k``."""
    d = np.abs(np.asarray(d, dtype=float).ravel())
    if not dec.parts:
        return np.zeros(1)
    out = np.zeros(dec.max_degree + 1)
    for k, part in dec.parts.items():
        out[k] = math.fsum(abs(c) * math.prod(x**e for x, e in zip(d, exps) if e)
                           for exps, c in part.terms.items())
    return out


def restrict_to_ray(dec: HomogeneousDecomposition, d: Sequence[float]) -> np.ndarray:
    """Coefficients ``c_0..c_p`` of the univariate polynomial ``t -> h(t d)``."""
    d = np.asarray(d, dtype=float).ravel()
    if d.shape[0] != dec.dimension:
        raise InputError(f"direction has length {d.shape[0]}, expected {dec.dimension}")
    if not np.any(d):
        raise InputError("direction must be nonzero")
    if not dec.parts:
        return np.zeros(1)
    c = np.zeros(dec.max_degree + 1)
    for k, part in dec.parts.items():
        c[k] = evaluate(part, d)
    return c

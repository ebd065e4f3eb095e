import itertools
from pathlib import Path

import numpy as np
import pytest

from polycert import Polynomial

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"


def random_polynomial(rng, n, degree, terms, *, integer=False, homogeneous=None):
    """Random sparse polynomial with up to ``terms`` monomials of degree <= ``degree``."""
    acc = {}
    for _ in range(terms):
        k = homogeneous if homogeneous is not None else int(rng.integers(0, degree + 1))
        e = tuple(int(v) for v in rng.multinomial(k, np.ones(n) / n))
        c = float(rng.integers(-5, 6)) if integer else float(rng.normal())
        acc[e] = acc.get(e, 0.0) + c
    return Polynomial(n, acc)


def random_unit(rng, n):
    v = rng.normal(size=n)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def corpus_files():
    return sorted(CORPUS.glob("*.pop"))


@pytest.fixture(scope="session")
def example_problem():
    from polycert import load_problem

    return load_problem(CORPUS / "diagonal_example.pop")


def exponent_grid(n, degree):
    return [e for e in itertools.product(range(degree + 1), repeat=n) if sum(e) <= degree]


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS):
            terminalreporter.write_line(line)

import itertools
from pathlib import Path

import pytest

from jonsson.algebra import FiniteAlgebra, load_algebra

ALGEBRAS = Path(__file__).resolve().parent.parent / "algebras"


def idempotent_ternary_algebras():
    """All 64 idempotent ternary operations on {0, 1}."""
    out = []
    for bits in itertools.product(range(2), repeat=6):
        free = iter(bits)
        table = [a if a == b == c else next(free)
                 for a, b, c in itertools.product(range(2), repeat=3)]
        out.append(FiniteAlgebra.from_tables("f" + "".join(map(str, bits)), 2, f=(3, table)))
    return out


@pytest.fixture(scope="session")
def lattice():
    return load_algebra(ALGEBRAS / "lattice2.alg")


@pytest.fixture(scope="session")
def majority():
    return load_algebra(ALGEBRAS / "majority2.alg")


@pytest.fixture(scope="session")
def pixley():
    return load_algebra(ALGEBRAS / "pixley2.alg")


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict = {}


def record_acceptance(number: int, ok: bool, detail: str) -> None:
    line = f"ACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])

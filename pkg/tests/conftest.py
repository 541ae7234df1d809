import pytest

from nilflow.algebra import Basis, SymbolicReal


@pytest.fixture(scope="session")
def basis():
    return Basis.default()


@pytest.fixture(scope="session")
def one():
    return SymbolicReal.rational(1)


@pytest.fixture(scope="session")
def sqrt2():
    return SymbolicReal.symbol("SQRT2")


@pytest.fixture(scope="session")
def sqrt3():
    return SymbolicReal.symbol("SQRT3")


@pytest.fixture(scope="session")
def sqrt6():
    return SymbolicReal.symbol("SQRT6")

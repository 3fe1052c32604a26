import pytest

from proofrepair.driver import Driver


def _load(*modules):
    d = Driver()
    for m in modules:
        d.load_module(m)
    return d


@pytest.fixture(scope="session")
def prelude():
    return _load("prelude")


@pytest.fixture(scope="session")
def natbin():
    return _load("natbin")


@pytest.fixture(scope="session")
def unit2():
    return _load("unit2")


@pytest.fixture(scope="session")
def zgz():
    return _load("zgz")


@pytest.fixture(scope="session")
def queues():
    return _load("queues")


@pytest.fixture(scope="session")
def poly():
    return _load("poly")

import pytest

from isocycles.ssgraph import build_graph


@pytest.fixture(scope="session")
def g179():
    return build_graph(179, 2)


@pytest.fixture(scope="session")
def g1009():
    return build_graph(1009, 2)


@pytest.fixture(scope="session")
def g3361():
    return build_graph(3361, 2)


@pytest.fixture(scope="session")
def g3229():
    return build_graph(3229, 3)

import itertools

import numpy as np
import pytest

from distcolor.graph import Graph


def complete(n):
    return Graph.from_edges(n, list(itertools.combinations(range(n), 2)))


def cycle(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star(k):
    return Graph.from_edges(k + 1, [(0, i) for i in range(1, k + 1)])


def petersen():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    return Graph.from_edges(10, outer + inner + spokes)


def random_graph(rng, n, density):
    edges = [(i, j) for i, j in itertools.combinations(range(n), 2) if rng.random() < density]
    return Graph.from_edges(n, edges)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=["numba", "numpy"])
def backend(request, monkeypatch):
    monkeypatch.setenv("DISTCOLOR_BACKEND", request.param)
    return request.param

import numpy as np
import pytest

from metablox import Graph, Partition


def graph_from(n, edges):
    return Graph.from_edges(n, edges)


@pytest.fixture
def triangle():
    return graph_from(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def path4():
    return graph_from(4, [(0, 1), (1, 2), (2, 3)])


@pytest.fixture
def star4():
    # K_{1,3}: node 0 is the hub
    return graph_from(4, [(0, 1), (0, 2), (0, 3)])


@pytest.fixture
def two_triangles():
    return graph_from(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])


def one_block(n):
    return Partition(np.zeros(n, dtype=np.int64), 1)


def labels(*labs):
    arr = np.asarray(labs, dtype=np.int64)
    return Partition(arr, int(arr.max()) + 1)

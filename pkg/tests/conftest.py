"""Shared fixtures: small hosts and trees reused across the suite."""

from itertools import combinations

import pytest

from treebed import Hypergraph, build_ktree, gen_hab


def complete_host(k, n):
    return Hypergraph(k, n, list(combinations(range(n), k)))


def path_tree(k, n):
    return build_ktree(k, n, [tuple(range(i, i + k)) for i in range(n - k + 1)])


def star_tree(k, n):
    head = tuple(range(k - 1))
    return build_ktree(k, n, [head + (x,) for x in range(k - 1, n)])


@pytest.fixture
def k6():
    return complete_host(3, 6)


@pytest.fixture
def h44():
    return gen_hab(3, range(4), range(4, 8))


@pytest.fixture
def path10():
    return path_tree(3, 10)


@pytest.fixture
def star9():
    return star_tree(3, 9)

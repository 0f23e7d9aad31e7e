"""Core hypergraph container and query tests."""

from itertools import combinations

import pytest

from treebed import Hypergraph, InvalidHypergraphError, largeness_check, walk_inspect
from treebed.hypergraph import extensible_edges

from conftest import complete_host


def brute_codegree(edges, f):
    f = set(f)
    return sum(1 for e in edges if f < set(e))


def test_construction_normalises_and_sorts():
    H = Hypergraph(3, 5, [(2, 1, 0), (4, 3, 2)])
    assert H.edges == ((0, 1, 2), (2, 3, 4))
    assert H.has_edge((1, 2, 0))
    assert (4, 2, 3) in H
    assert not H.has_edge((0, 1, 3))


@pytest.mark.parametrize("bad", [
    [(0, 0, 1)],          # repeated vertex
    [(0, 1)],             # wrong arity
    [(0, 1, 5)],          # out of range
    [(0, 1, 2), (2, 1, 0)],  # duplicate after sort
])
def test_construction_rejects_malformed(bad):
    with pytest.raises(InvalidHypergraphError):
        Hypergraph(3, 5, bad)


def test_degree_and_codegree_against_brute(k6):
    for v in range(6):
        assert k6.degree(v) == sum(1 for e in k6.edges if v in e)
    for f in combinations(range(6), 2):
        assert k6.codegree(f) == brute_codegree(k6.edges, f) == 4


def test_codegree_arity_guard(k6):
    with pytest.raises(ValueError):
        k6.codegree((0, 1, 2))


def test_neighbors_sorted_input_insensitive():
    H = Hypergraph(3, 6, [(0, 1, 2), (1, 2, 5), (0, 2, 4)])
    assert H.neighbors((2, 1)) == (0, 5)
    assert H.neighbors((1, 2)) == (0, 5)
    assert H.nbr_mask((5, 0)) == 0


def test_shadow_and_min_codegree(h44):
    # H(A,B) with |A|=|B|=4: every pair has codegree >= 2, attained
    assert h44.min_codegree() == 2
    sh = h44.shadow()
    assert all(len(f) == 2 for f in sh)
    assert sh == tuple(sorted(sh))
    # empty-ish host
    assert Hypergraph(3, 4, []).min_codegree() == 0


def test_joint_degree_and_within(k6):
    fam = [(0, 1), (2, 3)]
    assert k6.joint_degree(fam) == 2  # {4, 5}
    assert k6.joint_degree(fam, within=(4,)) == 1
    with pytest.raises(ValueError):
        k6.joint_degree([])


def test_restrict_and_edge_count_inside(k6):
    sub = k6.restrict(range(4))
    assert len(sub.edges) == 4
    assert sub.n == 6  # same universe
    assert k6.edge_count_inside(range(4)) == 4
    assert k6.edge_count_inside(range(3)) == 1


def test_k22_count_frozen_values(k6):
    # complete on 6: each partner vertex triple outside the edge, 3! matchings
    assert k6.k22_count((0, 1, 2)) == 6
    # too few partners on 5 vertices
    K5 = complete_host(3, 5)
    assert K5.k22_count((0, 1, 2)) == 0
    # the K^(3)(2) itself contains exactly one copy per edge
    parts = [(0, 1), (2, 3), (4, 5)]
    edges = [(a, b, c) for a in parts[0] for b in parts[1] for c in parts[2]]
    K222 = Hypergraph(3, 6, edges)
    assert K222.k22_count((0, 2, 4)) == 1
    with pytest.raises(ValueError):
        k6.k22_count((0, 1, 5, 2))


def test_largeness_check(h44, k6):
    # complete: every pair of shadow pairs has joint degree >= 2
    assert largeness_check(k6, 2).ok
    # H(4,4) has disjoint-class pairs with empty joint neighborhood
    rep = largeness_check(h44, 1)
    assert not rep.ok and rep.value == 0
    f, g = rep.witness
    assert h44.joint_degree([f, g]) == 0


def test_extensible_edges_thresholds(k6):
    # theta=1 demands k22 >= C(n-k, k) = C(3,3) = 1; every edge has count 6
    assert len(extensible_edges(k6, 1.0)) == 20
    # a lone edge has no K(2) copies at all
    lone = Hypergraph(3, 6, [(0, 1, 2)])
    assert extensible_edges(lone, 1.0) == []


def test_walk_inspect_basic(k6):
    w = walk_inspect(k6, (0, 1, 2, 0))
    assert w.length == 2
    assert w.interior == frozenset()
    assert w.start == (0, 1) and w.end == (2, 0)

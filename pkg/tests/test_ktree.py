"""Tight k-tree structure: building, layering, pseudopaths, decomposition.

The random-tree properties run under hypothesis with integer seeds so the
shrunk counterexample is always a (k, n, seed) triple that regenerates.
"""

from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from treebed import (InvalidTreeError, KTree, Layering, build_ktree,
                     decompose_beta_d, enumerate_small_ktrees,
                     find_separated_xfamily, flatten, gen_random_ktree,
                     k_partition, link_graph, pseudopath_between,
                     tree_distance, validate_decomposition)
from treebed.ktree import (Pseudopath, canonical_form, cut_first_layer,
                           induced_subtree, reorder_by_layering,
                           validate_layering)

from conftest import path_tree, star_tree


def rand_tree(k, n, seed, delta=4):
    return gen_random_ktree(k, n, max_degree=delta, seed=seed)


# -- construction ----------------------------------------------------------

def test_build_ordered_records_anchors(path10):
    T = path10
    assert T.k == 3 and T.n == 10
    assert T.vertex_order == tuple(range(10))
    # anchors exist only beyond the base edge
    assert set(T.anchors) == set(range(3, 10))
    assert T.anchors[5] == (3, 4)
    assert T.delta1 == max(T.degree(v) for v in T.vertices)


def test_build_unordered_repeels():
    edges = [(0, 1, 2), (0, 1, 3), (1, 3, 4)]
    T = build_ktree(3, 5, list(reversed(edges)), ordered=False)
    assert set(T.edge_set) == {(0, 1, 2), (0, 1, 3), (1, 3, 4)}
    # the peeled order is itself valid, so rebuilding ordered round-trips
    T2 = build_ktree(3, 5, list(T.edges), ordered=True)
    assert T2.edge_set == T.edge_set


@pytest.mark.parametrize("edges", [
    [(0, 1, 2), (3, 4, 5)],             # disconnected
    [(0, 1, 2), (0, 1, 2)],             # duplicate
    [(0, 1, 2), (0, 3, 4)],             # anchor not inside an edge
    [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)],  # a K4(3), not a tree
])
def test_build_rejects_non_trees(edges):
    n = max(v for e in edges for v in e) + 1
    with pytest.raises(InvalidTreeError):
        build_ktree(3, n, edges, ordered=False)


def test_edges_through_and_intro_index(path10):
    assert set(path10.edges_through(0)) == {(0, 1, 2)}
    assert set(path10.edges_through(3)) == {(1, 2, 3), (2, 3, 4), (3, 4, 5)}
    assert path10.intro_index(3) == 1


# -- links and partition ---------------------------------------------------

def test_link_is_spec_star_example():
    T = build_ktree(3, 5, [(1, 2, 3), (1, 2, 4), (1, 2, 5)])
    lk = link_graph(T, 1)
    assert lk.k == 2
    assert set(lk.edge_set) == {(2, 3), (2, 4), (2, 5)}


def test_k_partition_star_and_single_edge(star9):
    sizes = sorted(len(c) for c in k_partition(star9))
    assert sizes == [1, 1, 7]
    single = build_ktree(3, 3, [(0, 1, 2)])
    assert sorted(len(c) for c in k_partition(single)) == [1, 1, 1]


@given(st.integers(2, 4), st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_k_partition_properties(k, seed):
    n = 6 + seed % 30
    T = rand_tree(k, n, seed)
    classes = k_partition(T)
    assert len(classes) == k
    allv = sorted(v for c in classes for v in c)
    assert allv == sorted(T.vertices)
    # every edge meets every class exactly once
    for e in T.edges:
        assert sorted(sum(1 for v in e if v in set(c)) for c in classes) == [1] * k
    # size bound
    d = T.delta1
    for ci in classes:
        for cj in classes:
            assert len(ci) <= d ** (k - 1) * (len(cj) + 1)


# -- layering --------------------------------------------------------------

def test_flatten_star_spec_example(star9):
    L = flatten(star9, (0, 1))
    assert L.layers[0] == (0,)
    assert L.layers[1] == (1,)
    assert set(L.layers[2]) == set(range(2, 9))
    assert validate_layering(star9, (0, 1), L) is None


@given(st.integers(2, 4), st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_flatten_valid_and_growth_bounded(k, seed):
    n = 6 + seed % 40
    T = rand_tree(k, n, seed)
    r = tuple(sorted(T.vertex_order[:k - 1]))
    L = flatten(T, r)
    assert validate_layering(T, r, L) is None
    d = T.delta1
    for i, layer in enumerate(L.layers, start=1):
        assert len(layer) <= d ** (i - 1)


def test_reorder_by_layering_keeps_tree(path10):
    L = flatten(path10, (4, 5))
    T2 = reorder_by_layering(path10, L)
    assert T2.edge_set == path10.edge_set
    assert T2.edges[0] == tuple(sorted(L._order[0]))


# -- pseudopaths -----------------------------------------------------------

def all_pseudopaths(T, f, fp):
    """Independent oracle: DFS over edge sequences accepted by the
    Pseudopath validator, without consulting pseudopath_between."""
    f, fp = tuple(sorted(f)), tuple(sorted(fp))
    found = []

    def extend(chain):
        last = chain[-1]
        if set(fp) <= set(last):
            try:
                Pseudopath(k=T.k, edges=tuple(chain), f=f, fp=fp)
            except InvalidTreeError:
                return
            found.append(tuple(chain))
            return
        for e in T.edges:
            if e in chain:
                continue
            if len(set(e) & set(last)) != T.k - 1:
                continue
            extend(chain + [e])

    for e0 in T.edges:
        if set(f) <= set(e0):
            extend([e0])
    return found


def test_pseudopath_star_spec_example():
    T = build_ktree(3, 5, [(1, 2, 3), (1, 2, 4), (1, 2, 5)])
    P, dist = pseudopath_between(T, (1, 3), (1, 4))
    assert dist == 2
    assert P.edges == ((1, 2, 3), (1, 2, 4))
    assert tree_distance(T, (1, 3), (1, 4)) == 2
    assert tree_distance(T, (1, 3), (1, 3)) == 0


def test_pseudopath_unique_on_small_trees():
    for T in enumerate_small_ktrees(3, 6):
        if T.n < 4:
            continue
        shadow = T.shadow()
        for f, fp in combinations(shadow, 2):
            chains = all_pseudopaths(T, f, fp)
            assert len(chains) == 1, (T.edges, f, fp)
            P, _ = pseudopath_between(T, f, fp)
            assert P.edges == chains[0]


def test_pseudopath_rejects_non_shadow(path10):
    with pytest.raises(ValueError):
        pseudopath_between(path10, (0, 9), (0, 1))


# -- enumeration -----------------------------------------------------------

def test_enumerate_small_ktrees_frozen_counts():
    # k=2 matches the unlabeled tree counts 1,1,2,3,6 summed over n <= h
    assert len(enumerate_small_ktrees(2, 5)) == 7
    assert len(enumerate_small_ktrees(2, 6)) == 13
    assert len(enumerate_small_ktrees(3, 6)) == 9
    assert len(enumerate_small_ktrees(3, 7)) == 21


def test_enumeration_is_canonically_distinct():
    ts = enumerate_small_ktrees(3, 7)
    forms = {canonical_form(t) for t in ts}
    assert len(forms) == len(ts)


# -- subtrees, cutting, decomposition --------------------------------------

def test_cut_first_layer_star_spec_example():
    T = build_ktree(3, 5, [(1, 2, 3), (1, 2, 4), (1, 2, 5)])
    L = flatten(T, (1, 2))
    F, S = cut_first_layer(T, (1, 2), L)
    assert set(F) == set(T.edges)
    assert sorted(S) == [(2, 3), (2, 4), (2, 5)]
    for s in S:
        assert induced_subtree(T, s, L).empty


def test_induced_subtree_whole_tree(path10):
    L = flatten(path10, (0, 1))
    sl = induced_subtree(path10, (0, 1), L)
    assert not sl.empty
    assert sl.tree.edge_set == path10.edge_set


@given(st.integers(2, 4), st.integers(0, 10**6),
       st.sampled_from([(0.3, 2), (0.5, 1), (1.0, 1)]))
@settings(max_examples=60, deadline=None)
def test_decomposition_clauses(k, seed, bd):
    beta, d = bd
    n = 8 + seed % 40
    T = rand_tree(k, n, seed)
    r = tuple(sorted(T.vertex_order[:k - 1]))
    L = flatten(T, r)
    if len(T.edges) < 2 * T.delta1 ** d / beta:
        with pytest.raises(InvalidTreeError):
            decompose_beta_d(T, r, L, beta, d)
        return
    dec = decompose_beta_d(T, r, L, beta, d)
    assert validate_decomposition(T, r, L, dec) is None
    assert len(dec.parts) <= 2 * T.delta1 ** d / beta


def test_decompose_rejects_bad_params(path10):
    L = flatten(path10, (0, 1))
    with pytest.raises(ValueError):
        decompose_beta_d(path10, (0, 1), L, 0.0, 1)
    with pytest.raises(ValueError):
        decompose_beta_d(path10, (0, 1), L, 0.5, 0)


# -- canonical forms and families ------------------------------------------

@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_canonical_form_invariant_under_relabeling(seed):
    import random
    T = rand_tree(3, 9, seed)
    rng = random.Random(seed)
    perm = list(range(9))
    rng.shuffle(perm)
    edges = [tuple(sorted(perm[v] for v in e)) for e in T.edges]
    T2 = build_ktree(3, 9, edges, ordered=False)
    assert canonical_form(T) == canonical_form(T2)


def test_find_separated_xfamily_star(star9):
    # leaves share the anchor pair, so 2-separation keeps at most one tuple
    fam = find_separated_xfamily(star9, 2)
    assert fam.class_size == 7
    assert len(fam.tuples) == 1
    fam1 = find_separated_xfamily(star9, 1)
    assert len(fam1.tuples) >= 1
    # exclusion empties or shrinks the family rather than touching the root
    fam2 = find_separated_xfamily(star9, 1, exclude=range(9))
    assert len(fam2.tuples) == 0

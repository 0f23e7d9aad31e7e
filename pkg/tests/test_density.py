"""Density certification: exhaustive vs sampled, all three notions."""

from itertools import combinations

import pytest

from treebed import (Exhaustive, Hypergraph, Sampled, Typical, UniformlyDense,
                     WeaklyQuasirandom, density_check, gen_binomial)


def complete(n):
    return Hypergraph(3, n, list(combinations(range(n), 3)))


def test_typical_complete_exhaustive():
    # joint neighbourhoods exclude the family members, so eps has to absorb
    # |union F| / n even at rho = 1: worst family of 2 pairs loses 4 of 20
    rep = density_check(complete(20), Typical(1.0, 2, 0.25), Exhaustive())
    assert rep.passed
    assert rep.worst_slack >= 0
    assert rep.witnesses_checked > 0


def test_typical_fails_on_empty():
    H = Hypergraph(3, 8, [])
    rep = density_check(H, Typical(0.9, 1, 0.05), Exhaustive())
    assert not rep.passed
    assert rep.worst_slack < 0
    # worst witness is reproducible: a family with joint degree 0
    fam = rep.worst_witness
    assert H.joint_degree(list(fam)) == 0


def test_typical_sampled_matches_exhaustive_on_dense():
    H = gen_binomial(3, 20, 0.85, seed=4)
    ex = density_check(H, Typical(0.85, 2, 0.3), Exhaustive())
    sa = density_check(H, Typical(0.85, 2, 0.3), Sampled(300, seed=1))
    assert ex.passed == sa.passed
    assert sa.worst_slack >= ex.worst_slack  # sampling sees a subset


def test_uniformly_dense_complete():
    rep = density_check(complete(9), UniformlyDense(0.3, 1.0), Sampled(100, seed=0))
    assert rep.passed


def test_weakly_quasirandom_binomial_vs_planted():
    H = gen_binomial(3, 18, 0.5, seed=6)
    rep = density_check(H, WeaklyQuasirandom(0.4, 0.1), Sampled(200, seed=0))
    assert rep.passed
    # a host with all edges inside half the vertices is far from uniform
    half = list(combinations(range(9), 3))
    planted = Hypergraph(3, 18, half)
    rep2 = density_check(planted, WeaklyQuasirandom(0.4, 0.01), Sampled(200, seed=0))
    assert not rep2.passed


def test_sampled_deterministic_per_seed():
    H = gen_binomial(3, 16, 0.7, seed=3)
    a = density_check(H, Typical(0.7, 2, 0.2), Sampled(150, seed=5))
    b = density_check(H, Typical(0.7, 2, 0.2), Sampled(150, seed=5))
    assert (a.passed, a.worst_slack, a.worst_witness) == \
           (b.passed, b.worst_slack, b.worst_witness)


def test_report_carries_kind_and_mode():
    kind = Typical(0.7, 1, 0.3)
    mode = Sampled(50, seed=2)
    rep = density_check(gen_binomial(3, 14, 0.7, seed=1), kind, mode)
    assert rep.kind is kind and rep.mode is mode

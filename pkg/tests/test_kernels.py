"""Parity between the compiled kernels and the pure-Python twins.

Every kernel entry point is exercised on the same inputs through both
implementations; results must agree exactly.
"""

import random
from itertools import combinations

import pytest

from treebed import Hypergraph, gen_binomial
from treebed._kernels import IMPL, _pure

try:
    from treebed._kernels import _speed
except ImportError:
    _speed = None

needs_speed = pytest.mark.skipif(_speed is None,
                                 reason="compiled kernel not built")


def hosts():
    yield Hypergraph(3, 6, list(combinations(range(6), 3)))
    yield gen_binomial(3, 12, 0.5, seed=3)
    yield gen_binomial(4, 10, 0.4, seed=5)
    yield Hypergraph(3, 6, [(0, 1, 2)])


@needs_speed
def test_k22_parity():
    for H in hosts():
        cp = _pure.build_ctx(H.k, H.n, H._nbr)
        cs = _speed.build_ctx(H.k, H.n, H._nbr)
        for e in H.edges:
            assert _pure.k22_count(cp, e, None) == _speed.k22_count(cs, e, None)
        wm = (1 << (H.n - 2)) - 1
        for e in H.edges[:10]:
            assert _pure.k22_count(cp, e, wm) == _speed.k22_count(cs, e, wm)


@needs_speed
def test_min_pair_joint_degree_parity():
    for H in hosts():
        cp = _pure.build_ctx(H.k, H.n, H._nbr)
        cs = _speed.build_ctx(H.k, H.n, H._nbr)
        vp, fp, gp = _pure.min_pair_joint_degree(cp, None, floor=0)
        vs, fs, gs = _speed.min_pair_joint_degree(cs, None, floor=0)
        assert vp == vs
        # witnesses may differ in tie cases but must attain the value
        if fp is not None and gp is not None:
            assert H.joint_degree([fp, gp]) == vp
        if fs is not None and gs is not None:
            assert H.joint_degree([fs, gs]) == vs


@needs_speed
def test_reservoir_family_check_parity():
    rng = random.Random(0)
    for H in hosts():
        if not H.edges:
            continue
        cp = _pure.build_ctx(H.k, H.n, H._nbr)
        cs = _speed.build_ctx(H.k, H.n, H._nbr)
        members = tuple(v for v in range(H.n) if rng.random() < 0.4)
        umask = 0
        for v in members:
            umask |= 1 << v
        for h in (1, 2):
            rp = _pure.reservoir_family_check(cp, umask, len(members), 0.2, h,
                                              early_exit=False)
            rs = _speed.reservoir_family_check(cs, umask, len(members), 0.2, h,
                                               early_exit=False)
            assert rp == rs


def test_k22_frozen_values():
    K6 = Hypergraph(3, 6, list(combinations(range(6), 3)))
    assert K6.k22_count((0, 1, 2)) == 6
    parts = [(0, 1), (2, 3), (4, 5)]
    edges = [(a, b, c) for a in parts[0] for b in parts[1] for c in parts[2]]
    K222 = Hypergraph(3, 6, edges)
    for e in K222.edges:
        assert K222.k22_count(e) == 1


def test_impl_marker():
    assert IMPL in ("cy", "py")

"""Host and tree generators: the two-class extremal construction H(A, B),
binomial random hosts, and random bounded-degree tight k-trees.

H(A, B) keeps exactly the edges whose intersection with A has size in
I = { i in 0..k : i and floor(k/2) have different parity }. Consecutive
integers never both miss I, which is what makes the minimum codegree of
H(A, B) large (at least min(|A|, |B|) - k + 1) even though the construction
contains no spanning tight k-tree for suitable |A|.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import GeneratorError
from .hypergraph import Hypergraph, build_hypergraph
from .ktree import KTree, build_ktree, k_partition

__all__ = [
    "hab_index_set",
    "gen_hab",
    "ExtremalInstance",
    "extremal_instance",
    "gen_binomial",
    "gen_random_ktree",
]


def hab_index_set(k: int) -> frozenset:
    """The allowed |e ∩ A| sizes for H(A, B)."""
    return frozenset(i for i in range(k + 1) if i % 2 != (k // 2) % 2)


def gen_hab(k: int, A, B) -> Hypergraph:
    """The extremal host H(A, B) on the vertex classes A and B.

    A and B must partition 0..n-1. The result has minimum codegree at least
    min(|A|, |B|) - k + 1 (checked defensively).
    """
    A = frozenset(A)
    B = frozenset(B)
    if A & B:
        raise GeneratorError("A and B overlap")
    n = len(A) + len(B)
    if A | B != frozenset(range(n)):
        raise GeneratorError("A and B must partition 0..n-1")
    I = hab_index_set(k)
    edges = [e for e in combinations(range(n), k) if len(A.intersection(e)) in I]
    H = build_hypergraph(k, n, edges)
    floor = min(len(A), len(B)) - k + 1
    if H.min_codegree() < floor:
        raise GeneratorError(
            f"H(A,B) codegree {H.min_codegree()} below {floor}; construction bug"
        )
    return H


@dataclass(frozen=True)
class ExtremalInstance:
    """H(A, B) sized so that T cannot span it, with the certificate numbers.

    ``a`` is the largest integer at most n/2 that is not a subset sum of the
    k-partition class sizes of T, and |A| = a. No embedded copy of T can put
    a class union of size a into A, so T has no spanning copy here even
    though the codegree is at least a - k + 1. ``f`` = floor(n/2) - a + k - 1
    is the codegree gap this instance certifies.
    """

    H: Hypergraph
    A: frozenset
    B: frozenset
    a: int
    f: int


def extremal_instance(T: KTree) -> ExtremalInstance:
    """Build the extremal host certified against the spanning tree T.

    Raises GeneratorError when every a <= n/2 is a subset sum of the class
    sizes (then this construction cannot separate T).
    """
    n = T.n
    sizes = sorted(len(c) for c in k_partition(T))
    sums = {0}
    for s in sizes:
        sums |= {x + s for x in sums}
    a = None
    for cand in range(n // 2, 0, -1):
        if cand not in sums:
            a = cand
            break
    if a is None:
        raise GeneratorError(
            f"every a <= n/2 is a subset sum of the class sizes {sizes}"
        )
    f = n // 2 - a + T.k - 1
    A = frozenset(range(a))
    B = frozenset(range(a, n))
    return ExtremalInstance(H=gen_hab(T.k, A, B), A=A, B=B, a=a, f=f)


def gen_binomial(k: int, n: int, p: float, seed: int) -> Hypergraph:
    """Binomial random host: every k-set is an edge independently with
    probability p."""
    if not (0 <= p <= 1):
        raise GeneratorError(f"p must be in [0,1], got {p}")
    rng = np.random.default_rng(seed)
    total = math.comb(n, k)
    keep = rng.random(total) < p
    edges = [e for e, kept in zip(combinations(range(n), k), keep) if kept]
    return build_hypergraph(k, n, edges)


def gen_random_ktree(k: int, n: int, max_degree: int, seed: int, retry_cap: int = 64) -> KTree:
    """Random tight k-tree on 0..n-1 with maximum degree at most max_degree.

    Grows from the base edge 0..k-1; each new vertex picks an anchor
    uniformly among the (k-1)-subsets of existing edges whose members can
    all absorb one more incident edge. A growth that runs out of anchors is
    restarted with a fresh spawned seed; after ``retry_cap`` dead ends the
    parameters are deemed infeasible (for instance k=3, max_degree=2, n=5
    has no realization at all).
    """
    if max_degree < 1:
        raise GeneratorError("max_degree must be positive")
    if n < k:
        raise GeneratorError(f"need n >= k, got n={n}")
    if n > k and max_degree < 2:
        raise GeneratorError("max_degree=1 only allows the single base edge")
    master = random.Random(seed)
    for _ in range(retry_cap):
        rng = random.Random(master.getrandbits(64))
        edges = [tuple(range(k))]
        deg = {v: 1 for v in range(k)}
        ok = True
        for v in range(k, n):
            anchors = set()
            for e in edges:
                for f in combinations(e, k - 1):
                    if all(deg[u] < max_degree for u in f):
                        anchors.add(f)
            if not anchors:
                ok = False
                break
            anc = rng.choice(sorted(anchors))
            edges.append(tuple(sorted(anc + (v,))))
            for u in anc:
                deg[u] += 1
            deg[v] = 1
        if ok:
            return build_ktree(k, n, edges)
    raise GeneratorError(
        f"no k-tree with k={k}, n={n}, max_degree={max_degree} found "
        f"after {retry_cap} attempts"
    )

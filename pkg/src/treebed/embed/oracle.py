"""Backtracking oracle: exhaustive tree embedding for desk-scale instances.

Three-valued outcome: an embedding, a proof of absence (the search tree was
exhausted), or a timeout.  Used to cross-check the pipeline and to certify
non-embeddability of extremal instances.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .._bitset import bits, full_mask
from ..hypergraph import Hypergraph
from ..ktree import KTree
from .embedding import Embedding

__all__ = ["BruteResult", "brute_force_embed"]

_CHECK_EVERY = 2048


@dataclass(frozen=True)
class BruteResult:
    status: str  # "embedded" | "absent" | "timeout"
    embedding: Embedding | None
    nodes: int
    elapsed_ms: float

    @property
    def found(self) -> bool:
        return self.status == "embedded"


def brute_force_embed(H: Hypergraph, T: KTree, timeout_ms: int = 60000,
                      partial: dict | None = None) -> BruteResult:
    """Search for an embedding of T in H by DFS over T's stored valid order.

    The first k vertices (the base edge) range over all positions consistent
    with ``partial``; every later vertex ranges over the unused joint
    neighbourhood of its anchor's image, ascending.  "absent" is only
    reported when the whole search space was exhausted.

    ``partial`` pins tree vertices to host vertices before the search starts;
    pins are honoured exactly and may make the result trivially "absent".
    """
    k = T.k
    if H.k != k:
        raise ValueError(f"uniformity mismatch: host k={H.k}, tree k={k}")
    if T.n > H.n:
        return BruteResult("absent", None, 0, 0.0)

    order = list(T.vertex_order)
    pos = {v: i for i, v in enumerate(order)}
    pins: dict = dict(partial or {})
    for v, u in pins.items():
        if v not in pos:
            raise ValueError(f"pinned vertex {v} not in the tree")
        if not (0 <= u < H.n):
            raise ValueError(f"pinned image {u} outside the host")
    if len(set(pins.values())) != len(pins):
        return BruteResult("absent", None, 0, 0.0)

    # anchor masks: for i >= k, vertex order[i] must map into the joint
    # neighbourhood of the image of its anchor (k-1 already-placed vertices).
    anchors = [None] * len(order)
    for i in range(k, len(order)):
        anchors[i] = tuple(T.anchors[order[i]])

    deadline = time.monotonic() + timeout_ms / 1000.0
    start = time.monotonic()
    nodes = 0
    timed_out = False
    phi: dict = {}
    used = 0
    allmask = full_mask(H.n)

    def cand_mask(i: int) -> int:
        v = order[i]
        if v in pins:
            m = 1 << pins[v]
        elif i < k:
            m = allmask
        else:
            m = H.nbr_mask(tuple(phi[a] for a in anchors[i]))
        return m & ~used

    def rec(i: int) -> bool:
        nonlocal nodes, used, timed_out
        if i == len(order):
            return True
        nodes += 1
        if nodes % _CHECK_EVERY == 0 and time.monotonic() > deadline:
            timed_out = True
            return False
        v = order[i]
        for u in bits(cand_mask(i)):
            phi[v] = u
            used |= 1 << u
            base_ok = i != k - 1 or H.has_edge(tuple(phi[w] for w in order[:k]))
            if base_ok and rec(i + 1):
                return True
            used &= ~(1 << u)
            del phi[v]
            if timed_out:
                return False
        return False

    ok = rec(0)
    ms = (time.monotonic() - start) * 1000.0
    if ok:
        emb = Embedding(T, H, dict(phi))
        return BruteResult("embedded", emb, nodes, ms)
    if timed_out:
        return BruteResult("timeout", None, nodes, ms)
    return BruteResult("absent", None, nodes, ms)

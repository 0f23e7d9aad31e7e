"""k-uniform hypergraphs with an eager codegree index.

Vertices are 0..n-1. Every edge is kept as a sorted k-tuple, and for every
(k-1)-subset f of an edge the index stores the bitset of completions
N(f) = {v : f + {v} is an edge}. All degree-style queries reduce to
AND/popcount on these bitsets, which is also what the compute kernels
(pure or compiled) consume.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

from . import _kernels
from ._bitset import bits, full_mask, mask_of
from .errors import InvalidHypergraphError

__all__ = [
    "Hypergraph",
    "build_hypergraph",
    "LargenessReport",
    "largeness_check",
    "extensible_edges",
    "Walk",
    "walk_inspect",
]


class Hypergraph:
    """Immutable k-uniform hypergraph on vertex set {0, ..., n-1}."""

    __slots__ = ("k", "n", "edges", "edge_set", "_nbr", "_deg", "_edge_masks", "_ctx")

    def __init__(self, k: int, n: int, edges):
        if k < 2:
            raise InvalidHypergraphError(f"k must be at least 2, got {k}")
        if n < 0:
            raise InvalidHypergraphError(f"n must be nonnegative, got {n}")
        norm = []
        for e in edges:
            t = tuple(sorted(e))
            if len(t) != k or len(set(t)) != k:
                raise InvalidHypergraphError(f"edge {e!r} is not a set of {k} vertices")
            if t[0] < 0 or t[-1] >= n:
                raise InvalidHypergraphError(f"edge {e!r} out of range for n={n}")
            norm.append(t)
        if len(set(norm)) != len(norm):
            seen = set()
            for t in norm:
                if t in seen:
                    raise InvalidHypergraphError(f"duplicate edge {t!r}")
                seen.add(t)
        self.k = k
        self.n = n
        self.edges = tuple(sorted(norm))
        self.edge_set = frozenset(self.edges)
        nbr: dict = {}
        deg = [0] * n
        masks = []
        for t in self.edges:
            masks.append(mask_of(t))
            for i in range(k):
                f = t[:i] + t[i + 1 :]
                nbr[f] = nbr.get(f, 0) | (1 << t[i])
                deg[t[i]] += 1
        self._nbr = nbr
        self._deg = tuple(deg)
        self._edge_masks = tuple(masks)
        self._ctx = None

    # -- basic queries ----------------------------------------------------

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, e) -> bool:
        return tuple(sorted(e)) in self.edge_set

    def has_edge(self, e) -> bool:
        return tuple(sorted(e)) in self.edge_set

    def degree(self, v: int) -> int:
        return self._deg[v]

    def nbr_mask(self, f) -> int:
        """Bitset of completions of the (k-1)-set f (0 if none)."""
        return self._nbr.get(tuple(sorted(f)), 0)

    def neighbors(self, f) -> tuple:
        return tuple(bits(self.nbr_mask(f)))

    def codegree(self, f) -> int:
        t = tuple(sorted(f))
        if len(t) != self.k - 1 or len(set(t)) != self.k - 1:
            raise ValueError(f"{f!r} is not a ({self.k - 1})-set")
        return self._nbr.get(t, 0).bit_count()

    def shadow(self) -> tuple:
        """All (k-1)-sets with positive codegree, sorted."""
        return tuple(sorted(self._nbr))

    def min_codegree(self) -> int:
        """Minimum codegree over all (k-1)-subsets of the vertex set."""
        if self.n < self.k - 1:
            return 0
        best = None
        for f in combinations(range(self.n), self.k - 1):
            d = self._nbr.get(f, 0).bit_count()
            if best is None or d < best:
                best = d
                if best == 0:
                    break
        return 0 if best is None else best

    def joint_degree(self, fs, within=None) -> int:
        """|intersection of N(f) over f in fs|, optionally inside a vertex set.

        Members of the union of the family never count: N(f) already
        excludes the members of f.
        """
        fs = [tuple(sorted(f)) for f in fs]
        if not fs:
            raise ValueError("empty family")
        m = self._nbr.get(fs[0], 0)
        for f in fs[1:]:
            m &= self._nbr.get(f, 0)
        if within is not None:
            m &= within if isinstance(within, int) else mask_of(within)
        return m.bit_count()

    def restrict(self, vertices) -> "Hypergraph":
        """Subhypergraph on the same universe keeping edges inside ``vertices``."""
        vm = vertices if isinstance(vertices, int) else mask_of(vertices)
        kept = [e for e, m in zip(self.edges, self._edge_masks) if m & ~vm == 0]
        return Hypergraph(self.k, self.n, kept)

    def edge_count_inside(self, vertices) -> int:
        vm = vertices if isinstance(vertices, int) else mask_of(vertices)
        return sum(1 for m in self._edge_masks if m & ~vm == 0)

    # -- kernel-backed queries --------------------------------------------

    def _kernel_ctx(self):
        if self._ctx is None:
            self._ctx = _kernels.build_ctx(self.k, self.n, self._nbr)
        return self._ctx

    def k22_count(self, edge, within=None) -> int:
        """Number of copies of the complete k-partite k-graph with parts of
        size 2 that use ``edge`` as one side, partners drawn from ``within``."""
        if not self.has_edge(edge):
            raise ValueError(f"{edge!r} is not an edge")
        wm = None
        if within is not None:
            wm = within if isinstance(within, int) else mask_of(within)
        return _kernels.k22_count(self._kernel_ctx(), edge, wm)


def build_hypergraph(k: int, n: int, edges) -> Hypergraph:
    """Validating constructor; ``Hypergraph(k, n, edges)`` does the same."""
    return Hypergraph(k, n, edges)


# -- largeness ------------------------------------------------------------


@dataclass(frozen=True)
class LargenessReport:
    ok: bool
    threshold: int
    value: int
    witness: tuple  # pair (f, g) of shadow sets attaining ``value``


def largeness_check(H: Hypergraph, m: int, within=None) -> LargenessReport:
    """Check that every pair of distinct shadow sets has joint degree >= m.

    Pairs dominate singletons (deg(f) >= deg({f, g})), so scanning pairs
    suffices; the single-shadow-set degenerate case falls back to a plain
    degree. On failure the witness is the first pair found below m.
    """
    wm = None
    if within is not None:
        wm = within if isinstance(within, int) else mask_of(within)
    val, f, g = _kernels.min_pair_joint_degree(H._kernel_ctx(), wm, floor=m)
    return LargenessReport(ok=val >= m, threshold=m, value=val, witness=(f, g))


def extensible_edges(H: Hypergraph, theta: float, within=None) -> list:
    """Edges whose restricted K(2)-count clears theta * C(avail, k), where
    avail is the number of allowed partner vertices outside the edge."""
    wm = full_mask(H.n) if within is None else (
        within if isinstance(within, int) else mask_of(within)
    )
    out = []
    ctx = H._kernel_ctx()
    for e, em in zip(H.edges, H._edge_masks):
        avail = (wm & ~em).bit_count()
        threshold = theta * comb(avail, H.k)
        if _kernels.k22_count(ctx, e, wm) >= threshold:
            out.append(e)
    return out


# -- walks ----------------------------------------------------------------


@dataclass(frozen=True)
class Walk:
    """A tight walk: every window of k consecutive vertices spans an edge."""

    k: int
    seq: tuple

    @property
    def length(self) -> int:
        # Length counts windows (edges), not vertices: a walk on m vertices
        # has length m - k + 1.
        return len(self.seq) - self.k + 1

    @property
    def edge_count(self) -> int:
        return self.length

    @property
    def start(self) -> tuple:
        return self.seq[: self.k - 1]

    @property
    def end(self) -> tuple:
        return self.seq[-(self.k - 1):]

    @property
    def interior(self) -> frozenset:
        return frozenset(self.seq) - set(self.start) - set(self.end)

    @property
    def q(self) -> int:
        return len(self.interior)


def walk_inspect(H: Hypergraph, seq) -> Walk:
    """Validate ``seq`` as a tight walk in H and return it as a :class:`Walk`.

    Raises ValueError naming the first offending window.
    """
    seq = tuple(seq)
    k = H.k
    if len(seq) < k:
        raise ValueError(f"walk needs at least {k} vertices, got {len(seq)}")
    for v in seq:
        if not (0 <= v < H.n):
            raise ValueError(f"vertex {v} out of range")
    for i in range(len(seq) - k + 1):
        w = seq[i : i + k]
        if len(set(w)) != k:
            raise ValueError(f"window {i} repeats a vertex: {w}")
        if not H.has_edge(w):
            raise ValueError(f"window {i} is not an edge: {tuple(sorted(w))}")
    return Walk(k=k, seq=seq)

"""Tight k-trees and their structural algorithms.

A tight k-tree is a k-uniform hypergraph whose edges admit an ordering
e_1, ..., e_m in which every edge after the first introduces exactly one new
vertex (T1) and the other k-1 vertices of that edge lie together inside some
earlier edge (T2). The anchor of the new vertex v is its edge minus v.

This module provides the KTree structure plus everything built on top of it:
link graphs, the unique k-partition, layerings (flatten/validate), pseudopaths
and distance, induced subtrees, first-layer cuts, (beta, d)-decompositions,
X-tuple families, canonical forms and small-tree enumeration.

Vertex ids are arbitrary distinct integers; they do not need to be 0..n-1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations

from .errors import InvalidTreeError

__all__ = [
    "KTree",
    "build_ktree",
    "link_graph",
    "k_partition",
    "Layering",
    "flatten",
    "validate_layering",
    "Pseudopath",
    "pseudopath_between",
    "tree_distance",
    "lies_on",
    "SubtreeSlice",
    "induced_subtree",
    "cut_first_layer",
    "Decomposition",
    "DecompositionPart",
    "decompose_beta_d",
    "validate_decomposition",
    "canonical_form",
    "canonical_order",
    "enumerate_small_ktrees",
    "XTupleFamily",
    "find_separated_xfamily",
    "reorder_by_layering",
]


class KTree:
    """Immutable tight k-tree with a stored valid ordering.

    Attributes:
        k: uniformity (k >= 1; k-1 trees appear as link graphs).
        vertex_order: v_1..v_n, the first k being the base edge.
        edges: e_1..e_m as sorted tuples, in the stored valid order.
        parent: parent[i] = smallest j < i with anchor(e_i) inside e_j
            (None for the base edge).
        anchors: v -> sorted (k-1)-tuple, for every v beyond the first k.
    """

    __slots__ = ("k", "vertex_order", "edges", "parent", "anchors", "_deg", "_vset", "_eset")

    def __init__(self, k, vertex_order, edges, parent, anchors):
        self.k = k
        self.vertex_order = tuple(vertex_order)
        self.edges = tuple(edges)
        self.parent = tuple(parent)
        self.anchors = dict(anchors)
        deg: dict = {}
        for e in self.edges:
            for v in e:
                deg[v] = deg.get(v, 0) + 1
        self._deg = deg
        self._vset = frozenset(self.vertex_order)
        self._eset = frozenset(self.edges)

    @property
    def n(self) -> int:
        return len(self.vertex_order)

    @property
    def vertices(self) -> frozenset:
        return self._vset

    @property
    def edge_set(self) -> frozenset:
        return self._eset

    def __len__(self) -> int:
        return len(self.edges)

    def has_edge(self, e) -> bool:
        return tuple(sorted(e)) in self._eset

    def degree(self, v) -> int:
        return self._deg.get(v, 0)

    @property
    def delta1(self) -> int:
        """Maximum vertex degree (number of edges through a vertex)."""
        return max(self._deg.values())

    def edges_through(self, v) -> tuple:
        return tuple(e for e in self.edges if v in e)

    def shadow(self) -> tuple:
        """All (k-1)-subsets of edges, sorted, without repetition."""
        out = set()
        for e in self.edges:
            for f in combinations(e, self.k - 1):
                out.add(f)
        return tuple(sorted(out))

    def intro_index(self, v) -> int:
        """Index of the edge that introduces v (0 for base-edge vertices)."""
        if v in self.anchors:
            return self.vertex_order.index(v) - self.k + 1
        if v not in self._vset:
            raise ValueError(f"{v} is not a vertex")
        return 0


def build_ktree(k: int, n: int, edges, ordered: bool = True) -> KTree:
    """Build and validate a tight k-tree.

    With ``ordered=True`` the given edge order is validated against T1/T2.
    Otherwise a valid ordering is searched by leaf peeling: repeatedly remove
    the smallest vertex of degree 1 together with its edge. In a tight k-tree
    any degree-1 peel is safe, so the search is complete; the reconstructed
    ordering is validated at the end as a guard against false positives.
    """
    if k < 1:
        raise InvalidTreeError(f"k must be positive, got {k}")
    if n < k:
        raise InvalidTreeError(f"need n >= k, got n={n}, k={k}")
    norm = []
    for e in edges:
        t = tuple(sorted(e))
        if len(t) != k or len(set(t)) != k:
            raise InvalidTreeError(f"edge {e!r} is not a set of {k} vertices")
        norm.append(t)
    if len(set(norm)) != len(norm):
        raise InvalidTreeError("duplicate edge")
    if len(norm) != n - k + 1:
        raise InvalidTreeError(f"a k-tree on {n} vertices has {n - k + 1} edges, got {len(norm)}")
    vset = set()
    for e in norm:
        vset.update(e)
    if len(vset) != n:
        raise InvalidTreeError(f"edges span {len(vset)} vertices, expected {n}")

    if not ordered:
        norm = _peel_order(k, norm)
    return _validated(k, norm)


def _validated(k: int, norm, base_order=None) -> KTree:
    """Validate T1/T2 for edges in the given order and assemble the KTree.

    ``base_order`` optionally fixes the order of the first k vertices (it
    must be a permutation of the first edge); the default is sorted.
    """
    seen = set(norm[0])
    if base_order is not None:
        if sorted(base_order) != list(norm[0]):
            raise InvalidTreeError("base order is not a permutation of the first edge")
        order = list(base_order)
    else:
        order = sorted(norm[0])
    parent: list = [None]
    anchors = {}
    for i in range(1, len(norm)):
        e = norm[i]
        new = [v for v in e if v not in seen]
        if len(new) != 1:
            raise InvalidTreeError(
                f"edge {i + 1} ({e}) introduces {len(new)} new vertices, expected 1 (T1)"
            )
        v = new[0]
        anc = tuple(x for x in e if x != v)
        p = None
        for j in range(i):
            if set(anc) <= set(norm[j]):
                p = j
                break
        if p is None:
            raise InvalidTreeError(f"edge {i + 1} ({e}): {anc} lies in no earlier edge (T2)")
        parent.append(p)
        anchors[v] = anc
        seen.add(v)
        order.append(v)
    return KTree(k, order, norm, parent, anchors)


def _peel_order(k: int, norm):
    """Recover a valid edge order by repeated degree-1 leaf peeling."""
    edges_left = set(norm)
    deg: dict = {}
    at: dict = {}
    for e in norm:
        for v in e:
            deg[v] = deg.get(v, 0) + 1
            at.setdefault(v, set()).add(e)
    peeled = []
    while len(edges_left) > 1:
        leaf = None
        for v in sorted(deg):
            if deg[v] == 1:
                leaf = v
                break
        if leaf is None:
            raise InvalidTreeError("no valid ordering exists (peeling stuck)")
        (e,) = at[leaf]
        peeled.append(e)
        edges_left.discard(e)
        for u in e:
            deg[u] -= 1
            at[u].discard(e)
            if deg[u] == 0:
                del deg[u]
                del at[u]
    (base,) = edges_left
    return [base] + peeled[::-1]


def link_graph(T: KTree, v) -> KTree:
    """The restricted link T(v): strip v from every edge through v.

    The edges inherit T's order, which is a valid ordering of the link with
    the anchor of v first; the result is a (k-1)-tree on at most
    delta1(T) + k - 1 vertices.
    """
    if T.degree(v) == 0:
        raise InvalidTreeError(f"{v} is not a vertex of the tree")
    link_edges = [tuple(x for x in e if x != v) for e in T.edges if v in e]
    verts = set()
    for e in link_edges:
        verts.update(e)
    return build_ktree(T.k - 1, len(verts), link_edges, ordered=True)


def k_partition(T: KTree) -> list:
    """The unique k-partition as a list of frozensets.

    Class i collects vertex_order[i]; each later vertex joins the class its
    anchor misses.
    """
    k = T.k
    cls = {T.vertex_order[i]: i for i in range(k)}
    for v in T.vertex_order[k:]:
        used = {cls[u] for u in T.anchors[v]}
        (free,) = set(range(k)) - used
        cls[v] = free
    out = [set() for _ in range(k)]
    for v, c in cls.items():
        out[c].add(v)
    return [frozenset(s) for s in out]


# -- layerings ------------------------------------------------------------


class Layering:
    """Layers of a rooted k-tree, together with the peeling bookkeeping.

    ``layers[i]`` is local layer i+1 (1-based ranks); ``offset`` is the rank
    of ``layers[0]`` in the global layering this one was sliced from (1 for a
    fresh flatten). The private fields record the peel-order anchors and the
    insertion order of edges, which the cut/decomposition machinery relies
    on; they are carried along when slicing.
    """

    __slots__ = ("root", "layers", "offset", "_rank", "_anchors", "_order", "_base")

    def __init__(self, root, layers, offset=1, _anchors=None, _order=None, _base=None):
        self.root = tuple(sorted(root))
        self.layers = tuple(tuple(sorted(layer)) for layer in layers)
        self.offset = offset
        self._rank = {}
        for i, layer in enumerate(self.layers):
            for v in layer:
                self._rank[v] = i + 1
        self._anchors = dict(_anchors or {})
        self._order = tuple(_order or ())
        self._base = tuple(_base or ())

    @property
    def depth(self) -> int:
        return len(self.layers)

    def rank(self, v) -> int:
        """Local 1-based rank of a vertex."""
        return self._rank[v]

    def has_vertex(self, v) -> bool:
        return v in self._rank

    def is_layered(self, x) -> bool:
        """True when x meets k-1 consecutive layers, once each."""
        try:
            ranks = sorted(self._rank[v] for v in x)
        except KeyError:
            return False
        return (
            len(set(ranks)) == len(ranks)
            and ranks[-1] - ranks[0] == len(ranks) - 1
        )

    def tuple_rank(self, x) -> int:
        """Rank of a layered tuple: the index of its first layer."""
        if not self.is_layered(x):
            raise ValueError(f"{tuple(x)!r} is not layered")
        return min(self._rank[v] for v in x)

    def __repr__(self):
        return f"Layering(root={self.root}, layers={self.layers}, offset={self.offset})"


def flatten(T: KTree, r) -> Layering:
    """Layer (T, r) for a root r contained in some edge.

    The tree is peeled down to a single base edge containing r, removing at
    each step the smallest degree-1 vertex outside r (one always exists:
    a k-tree with at least two edges has at least two degree-1 leaves and no
    edge contains two of them, while r fits inside one edge). Vertices are
    re-inserted in reverse order; each re-insertion is forced, because the
    anchor occupies k-1 distinct layers forming either a width-k window with
    one interior gap (the vertex fills the gap) or a contiguous run (the
    vertex goes on top; one layer below would break L2 or L1).
    """
    r = tuple(sorted(r))
    k = T.k
    if len(r) != k - 1 or len(set(r)) != k - 1:
        raise ValueError(f"root must be a ({k - 1})-set, got {r!r}")
    if not any(set(r) <= set(e) for e in T.edges):
        raise ValueError(f"root {r!r} is not contained in any edge")

    deg = {v: T.degree(v) for v in T.vertex_order}
    at = {v: set(T.edges_through(v)) for v in T.vertex_order}
    alive = set(T.edges)
    peeled = []  # (vertex, anchor) in peel order
    rset = set(r)
    while len(alive) > 1:
        leaf = None
        for v in sorted(deg):
            if deg[v] == 1 and v not in rset:
                leaf = v
                break
        if leaf is None:  # cannot happen on a valid tree; defensive
            raise InvalidTreeError("peeling stuck during flatten")
        (e,) = at[leaf]
        peeled.append((leaf, tuple(x for x in e if x != leaf)))
        alive.discard(e)
        for u in e:
            deg[u] -= 1
            at[u].discard(e)
            if deg[u] == 0:
                del deg[u], at[u]
    (base,) = alive

    rank = {}
    for i, v in enumerate(r):
        rank[v] = i + 1
    (top,) = set(base) - rset
    rank[top] = k
    order = [base]
    anchors = {}
    for v, anc in reversed(peeled):
        ranks = sorted(rank[u] for u in anc)
        if ranks[-1] - ranks[0] == k - 1:
            (gap,) = set(range(ranks[0], ranks[-1] + 1)) - set(ranks)
            rank[v] = gap
        else:
            rank[v] = ranks[0] + k - 1
        anchors[v] = anc
        order.append(tuple(sorted(anc + (v,))))

    depth = max(rank.values())
    layers = [[] for _ in range(depth)]
    for v, i in rank.items():
        layers[i - 1].append(v)
    return Layering(r, layers, offset=1, _anchors=anchors, _order=order, _base=base)


def validate_layering(T: KTree, r, L: Layering):
    """Check clauses L1-L3; return None on pass, else (clause, detail).

    Raises ValueError when the layers are not a partition of V(T).
    """
    r = tuple(sorted(r))
    k = T.k
    seen = set()
    for layer in L.layers:
        for v in layer:
            if v in seen:
                raise ValueError(f"vertex {v} appears in two layers")
            seen.add(v)
    if seen != T.vertices:
        raise ValueError("layers do not cover V(T)")

    if len(L.layers[0]) != 1:
        return ("L1", f"|L_1| = {len(L.layers[0])}")
    for i in range(1, k):
        layer = set(L.layers[i - 1]) if i - 1 < len(L.layers) else set()
        if len(set(r) & layer) != 1:
            return ("L1", f"|r ∩ L_{i}| != 1")

    mates = {v: set() for v in T.vertex_order}
    for e in T.edges:
        for v in e:
            mates[v].update(e)
    for i in range(1, len(L.layers)):
        below = set(L.layers[i - 1])
        for v in L.layers[i]:
            if not (mates[v] & below):
                return ("L2", f"vertex {v} in L_{i + 1} has no neighbour in L_{i}")

    for e in T.edges:
        ranks = sorted(L.rank(v) for v in e)
        if len(set(ranks)) != k or ranks[-1] - ranks[0] != k - 1:
            return ("L3", f"edge {e} meets layers {ranks}")
    return None


def reorder_by_layering(T: KTree, L: Layering) -> KTree:
    """The same tree with edges in L's insertion order (base edge first)."""
    return _validated(T.k, list(L._order))


# -- pseudopaths ----------------------------------------------------------


@dataclass(frozen=True)
class Pseudopath:
    """A k-tree whose edges form a chain; the unique one between f and f'."""

    k: int
    edges: tuple
    f: tuple
    fp: tuple

    def __post_init__(self):
        t = len(self.edges)
        fs, fps = set(self.f), set(self.fp)
        for i, e in enumerate(self.edges):
            es = set(e)
            if (fs <= es) != (i == 0):
                raise InvalidTreeError(f"f must lie exactly in the first edge (edge {i + 1})")
            if (fps <= es) != (i == t - 1):
                raise InvalidTreeError(f"f' must lie exactly in the last edge (edge {i + 1})")
        seen = set(self.edges[0])
        for i in range(1, t):
            e = set(self.edges[i])
            new = e - seen
            if len(new) != 1:
                raise InvalidTreeError("chain edge introduces more than one vertex")
            anc = e - new
            if not anc <= set(self.edges[i - 1]):
                raise InvalidTreeError("chain anchor not in the previous edge")
            for j in range(i - 1):
                if anc <= set(self.edges[j]):
                    raise InvalidTreeError("chain parent is not the previous edge")
            seen |= new

    @property
    def distance(self) -> int:
        return len(self.edges)

    def as_ktree(self) -> KTree:
        verts = set()
        for e in self.edges:
            verts.update(e)
        return build_ktree(self.k, len(verts), list(self.edges), ordered=True)


def _pp_edges(T: KTree, f, fp):
    """Edge chain of the unique (f, f')-pseudopath, by peeling the last
    vertex of the stored ordering."""
    k = T.k
    f = frozenset(f)
    fp = frozenset(fp)
    prefix, suffix = [], []
    i = T.n  # current subtree is spanned by vertex_order[:i]
    while True:
        if i == k:
            mid = [T.edges[0]]
            break
        v = T.vertex_order[i - 1]
        e = T.edges[i - k]
        es = frozenset(e)
        if v in f and v in fp:
            mid = [e]
            break
        if v in f:
            if fp == es - {v}:
                mid = [e]
                break
            prefix.append(e)
            f = es - {v}
        elif v in fp:
            if f == es - {v}:
                mid = [e]
                break
            suffix.append(e)
            fp = es - {v}
        i -= 1
    return prefix + mid + suffix[::-1]


def pseudopath_between(T: KTree, f, fp):
    """The unique pseudopath from f to f' and its edge count (the distance).

    Distance is 1 exactly when |f ∩ f'| = k-2 and f ∪ f' is an edge.
    """
    f = tuple(sorted(f))
    fp = tuple(sorted(fp))
    if f == fp:
        raise ValueError("tuples must be distinct")
    shadow = set(T.shadow())
    if f not in shadow:
        raise ValueError(f"{f!r} is not in the shadow")
    if fp not in shadow:
        raise ValueError(f"{fp!r} is not in the shadow")
    chain = _pp_edges(T, f, fp)
    P = Pseudopath(k=T.k, edges=tuple(chain), f=f, fp=fp)
    return P, P.distance


def tree_distance(T: KTree, f, fp) -> int:
    """d_T(f, f'): edge count of the unique pseudopath; 0 for f = fp."""
    if tuple(sorted(f)) == tuple(sorted(fp)):
        return 0
    return len(_pp_edges(T, frozenset(f), frozenset(fp)))


def lies_on(P: Pseudopath, v) -> bool:
    """Whether v lies on the pseudopath: contained in exactly two of its edges."""
    return sum(1 for e in P.edges if v in e) == 2


# -- induced subtrees and cutting -----------------------------------------


@dataclass(frozen=True)
class SubtreeSlice:
    """Result of induced_subtree: possibly edgeless."""

    root: tuple
    tree: KTree | None
    layering: Layering | None

    @property
    def empty(self) -> bool:
        return self.tree is None

    @property
    def edge_count(self) -> int:
        return 0 if self.tree is None else len(self.tree.edges)


def _parent_edges(L: Layering):
    """For each non-base edge in insertion order, the earliest inserted edge
    containing its anchor."""
    parents = {}
    placed = []
    intro = {}
    for idx, e in enumerate(L._order):
        if idx == 0:
            placed.append(e)
            continue
        # the inserted vertex is the unique one whose recorded anchor matches
        v = None
        for cand in e:
            if L._anchors.get(cand) == tuple(sorted(set(e) - {cand})):
                v = cand
        anc = set(e) - {v}
        for q in placed:
            if anc <= set(q):
                parents[e] = q
                break
        placed.append(e)
        intro[e] = v
    return parents, intro


def induced_subtree(T: KTree, x, L: Layering) -> SubtreeSlice:
    """The subtree T_x hanging at a layered tuple x, with sliced layering.

    T_x is spanned by the edges whose peel anchor equals x, closed under
    children (edges whose parent chain passes through one of those). For the
    root of L the whole tree is returned. The subtree may be edgeless.
    """
    x = tuple(sorted(x))
    if x == L.root:
        return SubtreeSlice(root=x, tree=_validated(T.k, list(L._order)), layering=L)
    if not L.is_layered(x):
        raise ValueError(f"{x!r} is not layered")
    parents, intro = _parent_edges(L)
    comp = []
    comp_set = set()
    xs = set(x)
    for e in L._order[1:]:
        v = intro[e]
        if L._anchors[v] == x or parents.get(e) in comp_set:
            comp.append(e)
            comp_set.add(e)
    if not comp:
        return SubtreeSlice(root=x, tree=None, layering=None)

    tree = _validated(T.k, comp)
    lo = L.tuple_rank(x)
    vset = tree.vertices
    hi = max(L.rank(v) for v in vset)
    layers = []
    for i in range(lo, hi + 1):
        layers.append([v for v in L.layers[i - 1] if v in vset])
    sub_anchors = {v: L._anchors[v] for v in vset if v in L._anchors and v not in xs}
    sub = Layering(
        x,
        layers,
        offset=L.offset + lo - 1,
        _anchors=sub_anchors,
        _order=comp,
        _base=comp[0],
    )
    return SubtreeSlice(root=x, tree=tree, layering=sub)


def cut_first_layer(T: KTree, r, L: Layering):
    """Cut at the first layer: F = edges through the L_1 vertex, in insertion
    order; S = their residues e minus L_1, each layered with rank 2.

    The edges of T split exactly as F plus the edge sets of the subtrees
    hanging at the members of S (see induced_subtree).
    """
    (u1,) = L.layers[0]
    F = tuple(e for e in L._order if u1 in e)
    S = [tuple(sorted(set(e) - {u1})) for e in F]
    return F, S


# -- (beta, d)-decomposition ----------------------------------------------


@dataclass(frozen=True)
class DecompositionPart:
    tree: KTree
    root: tuple
    layering: Layering


@dataclass(frozen=True)
class Decomposition:
    parts: tuple
    beta: float
    d: int


def _slice_for(T, L, x):
    """Subtree slice for a frontier root; frontier roots always carry edges."""
    s = induced_subtree(T, x, L)
    if s.empty:
        raise InvalidTreeError(f"frontier root {x!r} has an edgeless subtree")
    return s


def decompose_beta_d(T: KTree, r, L: Layering, beta: float, d: int) -> Decomposition:
    """Split E(T) into at most 2 Delta^d / beta rooted parts of at most
    beta*t edges, later roots sitting at rank >= d inside an earlier part.

    Frontier roots are processed in lexicographic order. A big subtree is
    shaved down to depth d-1 by iterated first-layer cuts, subtrees below the
    small threshold beta*t/(2 Delta^d) are absorbed, and the part grows by
    cutting the lex-least pending root until its size crosses beta*t/2. A
    conservative overflow guard stops growth early whenever one more cut
    could push the part past beta*t (only relevant for d = 1).
    """
    t = len(T.edges)
    delta = T.delta1
    if not (0 < beta <= 1):
        raise ValueError(f"beta must be in (0, 1], got {beta}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if t < 2 * delta**d / beta:
        raise InvalidTreeError(
            f"need |E(T)| >= 2*Delta^d/beta = {2 * delta**d / beta:.1f}, got {t}"
        )
    small = beta * t / (2 * delta**d)
    target = beta * t / 2
    cap = beta * t

    edge_order_index = {e: i for i, e in enumerate(L._order)}
    parts = []
    frontier = {tuple(sorted(r))}
    while frontier:
        x = min(frontier)
        frontier.remove(x)
        sl = _slice_for(T, L, x)
        if len(sl.tree.edges) <= cap:
            parts.append(DecompositionPart(sl.tree, x, sl.layering))
            continue

        b_edges: set = set()
        level = [x]
        for _ in range(d - 1):
            nxt = []
            for s in sorted(level):
                ssl = induced_subtree(T, s, L)
                if ssl.empty:
                    continue
                F, S = cut_first_layer(ssl.tree, s, ssl.layering)
                b_edges.update(F)
                nxt.extend(S)
            level = nxt
        pending = []
        for s in sorted(level):
            ssl = induced_subtree(T, s, L)
            if ssl.empty:
                continue
            if len(ssl.tree.edges) < small:
                b_edges.update(ssl.tree.edges)
            else:
                pending.append(s)

        worst_step = delta + beta * t / (2 * delta ** (d - 1))
        while len(b_edges) < target and pending:
            if len(b_edges) + worst_step > cap:
                break
            z = min(pending)
            pending.remove(z)
            zsl = _slice_for(T, L, z)
            F, S = cut_first_layer(zsl.tree, z, zsl.layering)
            b_edges.update(F)
            for s in sorted(S):
                ssl = induced_subtree(T, s, L)
                if ssl.empty:
                    continue
                if len(ssl.tree.edges) < small:
                    b_edges.update(ssl.tree.edges)
                else:
                    pending.append(s)

        ordered = sorted(b_edges, key=edge_order_index.__getitem__)
        part_tree = _validated(T.k, ordered)
        lo = L.tuple_rank(x)
        vset = part_tree.vertices
        hi = max(L.rank(v) for v in vset)
        layers = [[v for v in L.layers[i - 1] if v in vset] for i in range(lo, hi + 1)]
        part_layering = Layering(
            x,
            layers,
            offset=L.offset + lo - 1,
            _anchors={v: L._anchors[v] for v in vset if v in L._anchors and v not in set(x)},
            _order=ordered,
            _base=ordered[0],
        )
        parts.append(DecompositionPart(part_tree, x, part_layering))
        frontier.update(pending)
    return Decomposition(parts=tuple(parts), beta=beta, d=d)


def validate_decomposition(T: KTree, r, L: Layering, dec: Decomposition):
    """Check the six decomposition clauses; None on pass, else (clause, detail)."""
    t = len(T.edges)
    delta = T.delta1
    m = len(dec.parts)
    if m > 2 * delta**dec.d / dec.beta:
        return (1, f"m = {m} exceeds 2*Delta^d/beta = {2 * delta**dec.d / dec.beta:.1f}")
    all_edges: list = []
    for p in dec.parts:
        all_edges.extend(p.tree.edges)
    if len(all_edges) != len(set(all_edges)) or set(all_edges) != set(T.edges):
        return (2, "part edge sets do not partition E(T)")
    for i, p in enumerate(dec.parts):
        if len(p.tree.edges) > dec.beta * t:
            return (3, f"part {i + 1} has {len(p.tree.edges)} > beta*t edges")
    if dec.parts[0].root != tuple(sorted(r)):
        return (4, "first root differs from r")
    for i, p in enumerate(dec.parts):
        if not L.is_layered(p.root):
            return (4, f"root of part {i + 1} is not layered")
    for j in range(1, m):
        vj = dec.parts[j].tree.vertices - set(dec.parts[j].root)
        for i in range(j):
            if vj & dec.parts[i].tree.vertices:
                return (5, f"interior of part {j + 1} meets part {i + 1}")
    for j in range(1, m):
        s = dec.parts[j].root
        ok = False
        for i in range(j):
            pi = dec.parts[i]
            if any(set(s) <= set(e) for e in pi.tree.edges):
                if pi.layering.is_layered(s) and pi.layering.tuple_rank(s) >= dec.d:
                    ok = True
                    break
        if not ok:
            return (6, f"root of part {j + 1} sits at rank < d in every earlier part")
    return None


# -- canonical forms and enumeration --------------------------------------


def canonical_form(T: KTree) -> tuple:
    """Isomorphism-invariant signature: the lexicographic minimum, over all
    valid orderings, of the per-edge anchor position tuples.

    Exponential in tree size; intended for trees of bounded size (links,
    small enumeration).
    """
    k = T.k
    m = len(T.edges)
    if m == 1:
        return ()
    best = None

    edge_sets = [frozenset(e) for e in T.edges]

    def rec(sig, pos, placed_edges, used_edges):
        nonlocal best
        if best is not None and sig > best[: len(sig)]:
            return
        if len(sig) == m - 1:
            if best is None or sig < best:
                best = sig
            return
        for ei in range(m):
            if used_edges[ei]:
                continue
            e = edge_sets[ei]
            new = [v for v in e if v not in pos]
            if len(new) != 1:
                continue
            anc = e - {new[0]}
            if not any(anc <= pe for pe in placed_edges):
                continue
            entry = tuple(sorted(pos[v] for v in anc))
            pos[new[0]] = len(pos)
            used_edges[ei] = True
            rec(sig + (entry,), pos, placed_edges + [e], used_edges)
            used_edges[ei] = False
            del pos[new[0]]

    for ei in range(m):
        base = edge_sets[ei]
        for perm in permutations(sorted(base)):
            pos = {v: i for i, v in enumerate(perm)}
            used = [False] * m
            used[ei] = True
            rec((), pos, [base], used)
    return best


def canonical_order(T: KTree):
    """A vertex order realizing canonical_form(T) (ties broken towards the
    lexicographically smallest vertex sequence)."""
    k = T.k
    m = len(T.edges)
    sig = canonical_form(T)
    best_seq = None

    edge_sets = [frozenset(e) for e in T.edges]

    def rec(depth, pos, seq, placed_edges, used_edges):
        nonlocal best_seq
        if depth == m - 1:
            if best_seq is None or seq < best_seq:
                best_seq = list(seq)
            return
        for ei in range(m):
            if used_edges[ei]:
                continue
            e = edge_sets[ei]
            new = [v for v in e if v not in pos]
            if len(new) != 1:
                continue
            anc = e - {new[0]}
            if not any(anc <= pe for pe in placed_edges):
                continue
            entry = tuple(sorted(pos[v] for v in anc))
            if entry != sig[depth]:
                continue
            pos[new[0]] = len(pos)
            used_edges[ei] = True
            rec(depth + 1, pos, seq + [new[0]], placed_edges + [e], used_edges)
            used_edges[ei] = False
            del pos[new[0]]

    if m == 1:
        return list(sorted(T.edges[0]))
    for ei in range(m):
        base = edge_sets[ei]
        for perm in permutations(sorted(base)):
            pos = {v: i for i, v in enumerate(perm)}
            used = [False] * m
            used[ei] = True
            rec(0, pos, list(perm), [base], used)
    return best_seq


def enumerate_small_ktrees(k: int, h: int, budget: int = 100000) -> list:
    """All tight k-trees with at most h vertices (and at least one edge), up
    to isomorphism, as canonically labelled KTrees on vertices 0..n-1.

    Grown breadth-first by attaching a new leaf at every (k-1)-subset of an
    existing edge and deduplicating by canonical form.
    """
    if h < k:
        raise ValueError(f"need h >= k, got h={h}, k={k}")
    base = build_ktree(k, k, [tuple(range(k))])
    out = [base]
    seen = {canonical_form(base)}
    frontier = [base]
    while frontier:
        nxt = []
        for T in frontier:
            if T.n >= h:
                continue
            new_v = T.n
            anchors = set()
            for e in T.edges:
                for f in combinations(e, k - 1):
                    anchors.add(f)
            for f in sorted(anchors):
                cand = build_ktree(
                    k, T.n + 1, list(T.edges) + [tuple(sorted(f + (new_v,)))]
                )
                sig = canonical_form(cand)
                if sig in seen:
                    continue
                seen.add(sig)
                relabel = {v: i for i, v in enumerate(canonical_order(cand))}
                canon = build_ktree(
                    cand.k,
                    cand.n,
                    [tuple(sorted(relabel[v] for v in e)) for e in cand.edges],
                    ordered=False,
                )
                out.append(canon)
                nxt.append(canon)
                if len(out) > budget:
                    raise InvalidTreeError(f"enumeration budget {budget} exceeded")
        frontier = nxt
    return out


# -- X-tuple families -----------------------------------------------------


@dataclass(frozen=True)
class XTupleFamily:
    """An ell-separated family of X-tuples (v_1..v_h, v*) of a k-tree."""

    X: KTree
    tuples: tuple
    separation: int
    class_size: int  # vertices of T whose link is isomorphic to X

    @property
    def h(self) -> int:
        return self.X.n


def _tuple_shadows(T: KTree, members):
    ms = set(members)
    out = set()
    for e in T.edges:
        if set(e) <= ms:
            for f in combinations(e, T.k - 1):
                out.add(f)
    return sorted(out)


def find_separated_xfamily(T: KTree, ell: int, exclude=None) -> XTupleFamily:
    """Most frequent link isomorphism class, thinned to pairwise pseudopath
    distance at least ell between the shadows of the induced tuples.

    ``exclude``: vertices that no tuple may touch (used by the pipeline to
    keep tuples clear of the subtree root).
    """
    excl = set(exclude or ())
    groups: dict = {}
    for w in sorted(T.vertex_order):
        sig = canonical_form(link_graph(T, w))
        groups.setdefault(sig, []).append(w)
    best_sig = max(sorted(groups), key=lambda s: len(groups[s]))
    members = groups[best_sig]

    w0 = members[0]
    L0 = link_graph(T, w0)
    relabel = {v: i for i, v in enumerate(canonical_order(L0))}
    X = build_ktree(
        L0.k, L0.n, [tuple(sorted(relabel[v] for v in e)) for e in L0.edges], ordered=False
    )

    kept = []
    kept_shadows = []
    for w in members:
        lk = link_graph(T, w)
        tup = tuple(canonical_order(lk)) + (w,)
        if excl & set(tup):
            continue
        shadows = _tuple_shadows(T, tup)
        far = True
        for prev in kept_shadows:
            for f in shadows:
                for g in prev:
                    if tree_distance(T, f, g) < ell:
                        far = False
                        break
                if not far:
                    break
            if not far:
                break
        if far:
            kept.append(tup)
            kept_shadows.append(shadows)
    return XTupleFamily(
        X=X, tuples=tuple(kept), separation=ell, class_size=len(members)
    )

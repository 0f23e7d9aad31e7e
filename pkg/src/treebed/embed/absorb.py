"""Absorbing structures: tuple search, family selection, covering, completion.

An absorbing tuple (u_1, ..., u_h, u*) for an ordered k-tuple (v_1, ..., v_k)
satisfies two clauses: (A) {v_1, ..., v_{k-1}, u*} is an edge, and (B) the
entries u_1, ..., u_h carry a copy of the pattern (k-1)-tree X that lies in
the link intersection of v_k and u*.  We pin the witness copy to the tuple
order: entry j is the image of the j-th vertex of X in sorted label order.
The pinned reading is what the completion swap actually consumes; an
existential reading would leave a gap between the copy that exists and the
copy realized by the partial embedding.
"""

import random
from dataclasses import dataclass
from itertools import permutations

from .._bitset import bits, full_mask, mask_of
from ..errors import EmbedError
from ..ktree import (
    KTree,
    _tuple_shadows,
    flatten,
    link_graph,
    pseudopath_between,
    reorder_by_layering,
    tree_distance,
)
from .embedding import Embedding, validate_embedding
from .params import min_ell
from .trunk import embed_pseudopath

__all__ = [
    "AbsorbingTuple",
    "AbsorbingFamily",
    "validate_absorbing",
    "find_absorbing_tuples",
    "select_absorbing_family",
    "is_x_covered",
    "cover_embedding",
    "absorb_complete",
]


@dataclass(frozen=True)
class AbsorbingTuple:
    """An (h+1)-tuple (u_1, ..., u_h, u*) of host vertices.

    ``us[j]`` is the image of the j-th vertex of the pattern tree in sorted
    label order; that map is the pinned witness copy.
    """

    us: tuple
    ustar: int

    @property
    def vertices(self) -> tuple:
        return self.us + (self.ustar,)


def validate_absorbing(H, X, target, tup) -> str | None:
    """First violated clause for ``tup`` absorbing ``target``, or None.

    Clause (A): target[:k-1] completed by u* is an edge.  Clause (B): the
    pinned witness copy of X on ``tup.us`` lies in the link intersection of
    target[k-1] and u*.
    """
    k = H.k
    target = tuple(target)
    if len(target) != k or len(set(target)) != k:
        return f"target {target!r} is not a tuple of {k} distinct vertices"
    for v in target:
        if not 0 <= v < H.n:
            return f"target vertex {v} out of range"
    if X.k != k - 1:
        return f"pattern tree has uniformity {X.k}, expected {k - 1}"
    if len(tup.us) != X.n:
        return f"tuple carries {len(tup.us)} link vertices, X has {X.n}"
    verts = tup.vertices
    if len(set(verts)) != len(verts):
        return f"tuple entries {verts!r} are not distinct"
    for w in verts:
        if not 0 <= w < H.n:
            return f"tuple vertex {w} out of range"
    head, vk = target[:-1], target[-1]
    if tup.ustar in head:
        return f"u* = {tup.ustar} lies in the leading (k-1)-tuple"
    if not H.has_edge(head + (tup.ustar,)):
        return f"(A) fails: {tuple(sorted(head + (tup.ustar,)))} is not an edge"
    image = dict(zip(sorted(X.vertices), tup.us))
    for e in X.edges:
        s = tuple(sorted(image[x] for x in e))
        if vk in s:
            return f"(B) fails: witness edge {s} passes through v_k"
        if not H.has_edge(s + (vk,)):
            return f"(B) fails: {tuple(sorted(s + (vk,)))} is not an edge"
        if not H.has_edge(s + (tup.ustar,)):
            return f"(B) fails: {tuple(sorted(s + (tup.ustar,)))} is not an edge"
    return None


def find_absorbing_tuples(H, X, target, cap=None, *, within=None) -> list:
    """Absorbing X-tuples for the ordered k-tuple ``target``.

    Constructive search: choose u* completing target[:k-1] to an edge, then
    grow the witness copy of X inside the link intersection of target[k-1]
    and u* along X's valid ordering.  The base edge of the copy is drawn
    from actual intersection edges, in every vertex order; with cap None and
    within None the search enumerates the whole absorbing set for the
    target, so a brute-force count over all (h+1)-tuples agrees with it.

    ``within`` restricts the tuple's vertices (not the target) to a pool.
    """
    k = H.k
    target = tuple(target)
    if len(target) != k or len(set(target)) != k:
        raise ValueError(f"target must be {k} distinct vertices, got {target!r}")
    for v in target:
        if not 0 <= v < H.n:
            raise ValueError(f"target vertex {v} out of range")
    if X.k != k - 1:
        raise ValueError(
            f"pattern tree must be a {k - 1}-tree for a {k}-graph, got uniformity {X.k}"
        )
    head, vk = target[:-1], target[-1]
    pool_mask = full_mask(H.n) if within is None else mask_of(within)
    labels = sorted(X.vertices)
    order = X.vertex_order
    base_xs = order[: k - 1]
    rest = order[k - 1 :]

    # (k-1)-sets completing v_k to an edge; candidates for the witness base
    vk_link = [
        tuple(x for x in e if x != vk)
        for e, m in zip(H.edges, H._edge_masks)
        if vk in e and not (m & ~pool_mask & ~(1 << vk))
    ]

    found = []

    def grow(idx, chosen, ustar):
        if cap is not None and len(found) >= cap:
            return
        if idx == len(rest):
            found.append(
                AbsorbingTuple(us=tuple(chosen[x] for x in labels), ustar=ustar)
            )
            return
        x = rest[idx]
        img = tuple(chosen[a] for a in X.anchors[x])
        cand = H.nbr_mask(img + (vk,)) & H.nbr_mask(img + (ustar,)) & pool_mask
        taken = set(chosen.values())
        for w in bits(cand):
            if w in taken:
                continue
            chosen[x] = w
            grow(idx + 1, chosen, ustar)
            del chosen[x]

    for ustar in bits(H.nbr_mask(head) & pool_mask):
        if cap is not None and len(found) >= cap:
            break
        for s in vk_link:
            if cap is not None and len(found) >= cap:
                break
            if ustar in s or not H.has_edge(s + (ustar,)):
                continue
            for perm in permutations(s):
                if cap is not None and len(found) >= cap:
                    break
                grow(0, dict(zip(base_xs, perm)), ustar)
    return found


@dataclass(frozen=True)
class AbsorbingFamily:
    """Pairwise disjoint absorbing tuples plus the sampling diagnostics."""

    X: KTree
    tuples: tuple
    alpha: float
    seed: int
    min_coverage: int
    samples: int

    @property
    def h(self) -> int:
        return self.X.n

    def __len__(self) -> int:
        return len(self.tuples)

    def __iter__(self):
        return iter(self.tuples)


def select_absorbing_family(H, X, alpha, seed) -> AbsorbingFamily:
    """Randomized greedy family of at most floor(alpha*n) disjoint tuples.

    Samples random k-tuples, collects their absorbing tuples, and keeps any
    tuple vertex-disjoint from those already kept.  ``min_coverage`` is the
    smallest number of kept tuples absorbing a k-tuple over a fresh sample
    batch: a desk-scale stand-in for the counting guarantee.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if H.n < H.k:
        raise ValueError("host too small to sample k-tuples")
    limit = int(alpha * H.n)
    rng = random.Random(seed)
    kept = []
    used = set()
    rounds = max(60, 30 * max(limit, 1))
    for _ in range(rounds):
        if len(kept) >= limit:
            break
        t = tuple(rng.sample(range(H.n), H.k))
        pool = [w for w in range(H.n) if w not in used]
        cands = find_absorbing_tuples(H, X, t, cap=48, within=pool)
        rng.shuffle(cands)
        for tup in cands:
            vs = set(tup.vertices)
            if vs & used:
                continue
            kept.append(tup)
            used |= vs
            break
    if not kept:
        raise EmbedError("no disjoint absorbing tuples found", stage="family")
    samples = 8
    worst = None
    for _ in range(samples):
        t = tuple(rng.sample(range(H.n), H.k))
        c = sum(1 for tup in kept if validate_absorbing(H, X, t, tup) is None)
        worst = c if worst is None else min(worst, c)
    return AbsorbingFamily(
        X=X,
        tuples=tuple(kept),
        alpha=alpha,
        seed=seed,
        min_coverage=worst,
        samples=samples,
    )


def is_x_covered(T, X, phi, tup) -> bool:
    """Whether an X-tuple of T maps position-wise onto ``tup`` under phi."""
    inv = {w: v for v, w in phi.items()}
    if tup.ustar not in inv:
        return False
    vstar = inv[tup.ustar]
    pre = []
    for u in tup.us:
        if u not in inv:
            return False
        pre.append(inv[u])
    if T.degree(vstar) == 0:
        return False
    lk = link_graph(T, vstar)
    if lk.n != len(pre) or set(lk.vertices) != set(pre):
        return False
    image = dict(zip(sorted(X.vertices), pre))
    if len(X.edges) != len(lk.edges):
        return False
    return all(
        tuple(sorted(image[x] for x in e)) in lk.edge_set for e in X.edges
    )


def _as_tuples(A) -> list:
    if isinstance(A, AbsorbingFamily):
        return list(A.tuples)
    out = []
    for t in A:
        if isinstance(t, AbsorbingTuple):
            out.append(t)
        else:
            out.append(AbsorbingTuple(us=tuple(t[:-1]), ustar=t[-1]))
    return out


def _route_chain(H, P, pins, pool_mask, budget=200000):
    """Backtracking chain embedder allowing arbitrary pre-pinned vertices.

    Used when a route shares more than its endpoints with already embedded
    territory, which the public pseudopath embedder does not support.
    """
    phi = dict(pins)
    if len(set(phi.values())) != len(phi):
        raise EmbedError("route pins collide", stage="cover")
    edges = P.edges
    remaining = [budget]

    def rec(j, used_mask):
        if j == len(edges):
            return True
        remaining[0] -= 1
        if remaining[0] < 0:
            return False
        e = edges[j]
        free = [v for v in e if v not in phi]
        if not free:
            got = tuple(phi[v] for v in e)
            return H.has_edge(got) and rec(j + 1, used_mask)
        v = free[0]
        img = tuple(phi[u] for u in e if u != v)
        for w in bits(H.nbr_mask(img) & pool_mask & ~used_mask):
            phi[v] = w
            if rec(j + 1, used_mask | (1 << w)):
                return True
            del phi[v]
        return False

    if not rec(0, mask_of(phi.values())):
        raise EmbedError(
            f"no embedding of the {len(edges)}-edge connecting chain",
            stage="cover",
        )
    return phi


def cover_embedding(H, A, Tp, B, rp, f0) -> Embedding:
    """Embedding of Tp pinned at the root with every A-tuple X-covered.

    Selects |A| tuples from the separated family B by increasing pseudopath
    distance from the root, routes a pseudopath to each, places the tuple
    onto its absorbing counterpart, and finishes with a greedy completion
    constrained by every fully anchored edge.
    """
    k = Tp.k
    if H.k != k:
        raise ValueError(f"uniformity mismatch: host {H.k}, tree {k}")
    rp = tuple(rp)
    f0 = tuple(f0)
    if len(rp) != k - 1 or len(set(rp)) != k - 1:
        raise ValueError(f"root must be {k - 1} distinct tree vertices, got {rp!r}")
    if len(f0) != k - 1 or len(set(f0)) != k - 1:
        raise ValueError(f"f0 must be {k - 1} distinct host vertices, got {f0!r}")
    for w in f0:
        if not 0 <= w < H.n:
            raise ValueError(f"host vertex {w} out of range")
    root_set = tuple(sorted(rp))
    if root_set not in set(Tp.shadow()):
        raise ValueError(f"{rp!r} is not in the shadow of the tree")
    tuples_a = _as_tuples(A)

    seen_hosts = set()
    for i, tup in enumerate(tuples_a):
        vs = set(tup.vertices)
        if vs & seen_hosts:
            raise ValueError(f"absorbing tuples are not pairwise disjoint at tuple {i}")
        seen_hosts |= vs
        if len(tup.us) != B.h:
            raise ValueError(
                f"tuple {i} carries {len(tup.us)} link vertices, family pattern has {B.h}"
            )

    if len(B.tuples) < len(tuples_a):
        raise ValueError(
            f"family has {len(B.tuples)} tuples but {len(tuples_a)} absorbing tuples need covering"
        )

    if tuples_a and len(B.tuples) >= 2:
        need = 2 * Tp.delta1 * k * (min_ell(k) + 3 * k)
        shad = [_tuple_shadows(Tp, bt) for bt in B.tuples]
        for i in range(len(shad)):
            for j in range(i + 1, len(shad)):
                d = min(
                    tree_distance(Tp, f, g) for f in shad[i] for g in shad[j]
                )
                if d < need:
                    raise ValueError(
                        f"family is not {need}-separated: tuples {i} and {j} at distance {d}"
                    )

    phi = {v: w for v, w in zip(rp, f0)}
    used = set(f0)

    if tuples_a:
        usable = [bt for bt in B.tuples if not set(bt) & set(rp)]
        if len(usable) < len(tuples_a):
            raise ValueError(
                "family too small after discarding tuples meeting the root"
            )
        dist = {
            bt: min(tree_distance(Tp, root_set, f) for f in _tuple_shadows(Tp, bt))
            for bt in usable
        }
        usable.sort(key=lambda bt: dist[bt])
        # drop tuples crowding the root while spares allow, as the selection
        # argument does
        near = Tp.delta1 * k * (min_ell(k) + 3 * k)
        while len(usable) > len(tuples_a) and dist[usable[0]] < near:
            usable.pop(0)
        chosen = usable[: len(tuples_a)]

        embedded_edges = []
        for i, (bt, tup) in enumerate(zip(chosen, tuples_a)):
            future = set()
            for t2 in tuples_a[i + 1 :]:
                future |= set(t2.vertices)
            # boundary pair minimizing the route length
            b_shad = _tuple_shadows(Tp, bt)
            if embedded_edges:
                t_cands = set()
                for e in embedded_edges:
                    for j in range(k):
                        t_cands.add(e[:j] + e[j + 1 :])
                t_cands = sorted(t_cands)
            else:
                t_cands = [root_set]
            best = None
            for tc in t_cands:
                for bc in b_shad:
                    if tc == bc:
                        continue
                    d = tree_distance(Tp, tc, bc)
                    if best is None or d < best[0]:
                        best = (d, tc, bc)
            if best is None:
                raise EmbedError(
                    f"no route from the embedded region to tuple {i}", stage="cover"
                )
            _, t_i, b_i = best

            # place the tuple onto its absorbing counterpart
            pairs = list(zip(bt, tup.vertices))
            for v, w in pairs:
                if v in phi:
                    if phi[v] != w:
                        raise EmbedError(
                            f"tuple {i} collides with the embedded region at vertex {v}",
                            stage="cover",
                        )
                    continue
                if w in used:
                    raise EmbedError(
                        f"host {w} of tuple {i} is already used", stage="cover"
                    )
                phi[v] = w
                used.add(w)
            embedded_edges.extend(Tp.edges_through(bt[-1]))

            P, _ = pseudopath_between(Tp, t_i, b_i)
            chain_verts = set()
            for e in P.edges:
                chain_verts.update(e)
            pre = {v for v in chain_verts if v in phi}
            pool = [
                w
                for w in range(H.n)
                if w not in used and w not in future
            ]
            if pre == set(t_i) | set(b_i) and not set(t_i) & set(b_i):
                x = tuple(phi[v] for v in P.f)
                y = tuple(phi[v] for v in P.fp)
                emb = embed_pseudopath(H, P, x, y, within=pool)
                route = emb.phi
            else:
                pins = {v: phi[v] for v in pre}
                route = _route_chain(H, P, pins, mask_of(pool) | mask_of(pins.values()))
            for v, w in route.items():
                if v not in phi:
                    phi[v] = w
                    used.add(w)
            embedded_edges.extend(P.edges)

        # every A-tuple must now be covered through the placements
        for i, tup in enumerate(tuples_a):
            if not is_x_covered(Tp, B.X, phi, tup):
                raise EmbedError(
                    f"tuple {i} is not X-covered after placement", stage="cover"
                )

    # edges already closed inside the embedded region must map to edges
    for e in Tp.edges:
        if all(v in phi for v in e):
            if not H.has_edge(tuple(phi[v] for v in e)):
                raise EmbedError(
                    f"edge {e} closed inside the covered region maps to a non-edge",
                    stage="cover",
                )

    Tw = reorder_by_layering(Tp, flatten(Tp, root_set))
    used_mask = mask_of(phi.values())
    full = full_mask(H.n)
    for v in Tw.vertex_order:
        if v in phi:
            continue
        cand = full & ~used_mask
        for e in Tp.edges_through(v):
            rest = tuple(u for u in e if u != v)
            if all(u in phi for u in rest):
                cand &= H.nbr_mask(tuple(phi[u] for u in rest))
        if not cand:
            raise EmbedError(
                f"no host available for vertex {v} in the greedy completion",
                stage="cover",
            )
        w = next(bits(cand))
        phi[v] = w
        used_mask |= 1 << w

    err = validate_embedding(H, Tp, phi)
    if err is not None:
        raise EmbedError(f"covering produced an invalid embedding: {err}", stage="cover")
    return Embedding(Tp, H, phi)


def absorb_complete(H, T, T0, phi0, X, A) -> Embedding:
    """Swap-based completion of a partial embedding using covered tuples.

    Implements the completion iteration literally: for each leftover host
    vertex, find an unused absorbing tuple for the anchor image, swap the
    preimage of its u* onto the leftover vertex, and embed the new tree
    vertex on u*.  Every intermediate map is checked for injectivity and
    edge preservation, and the bookkeeping invariants are enforced.
    """
    k = T.k
    if H.k != k:
        raise ValueError(f"uniformity mismatch: host {H.k}, tree {k}")
    if H.n != T.n:
        raise ValueError(
            f"completion needs a spanning instance, got |V(H)| = {H.n}, |V(T)| = {T.n}"
        )
    np_ = T0.n
    if np_ < k:
        raise ValueError("T0 must contain at least the base edge of T")
    prefix = T.vertex_order[:np_]
    pset = set(prefix)
    if set(T0.vertices) != pset:
        raise ValueError("T0 is not the prefix of T's valid ordering")
    induced = {e for e in T.edges if all(v in pset for v in e)}
    if set(T0.edge_set) != induced:
        raise ValueError("T0 is not the induced prefix subtree of T")
    err = validate_embedding(H, T0, phi0)
    if err is not None:
        raise ValueError(f"phi0 is not an embedding of T0: {err}")

    tuples_a = _as_tuples(A)
    seen_hosts = set()
    for i, tup in enumerate(tuples_a):
        vs = set(tup.vertices)
        if vs & seen_hosts:
            raise ValueError(f"absorbing tuples are not pairwise disjoint at tuple {i}")
        seen_hosts |= vs
        if not is_x_covered(T, X, phi0, tup):
            raise ValueError(f"tuple {i} is not X-covered by the initial embedding")

    m = T.n - np_
    if m == 0:
        return Embedding(T, H, dict(phi0))

    xs = sorted(set(range(H.n)) - set(phi0.values()))
    phi = dict(phi0)
    inv = {w: v for v, w in phi.items()}
    inv0 = dict(inv)
    used_idx = set()
    image0 = set(phi0.values())

    for i in range(m):
        v_new = T.vertex_order[np_ + i]
        anc = T.anchors[v_new]
        w_head = tuple(phi[u] for u in anc)
        wk = xs[i]
        target = w_head + (wk,)

        pick = None
        for j, tup in enumerate(tuples_a):
            if j in used_idx:
                continue
            if validate_absorbing(H, X, target, tup) is None:
                pick = j
                break
        if pick is None:
            raise EmbedError(
                f"no unused absorbing tuple for the k-tuple {target}", stage="absorb"
            )
        tup = tuples_a[pick]
        if not is_x_covered(T, X, phi, tup):
            raise EmbedError(
                f"tuple {pick} lost its X-cover before the swap for {target}",
                stage="absorb",
            )
        used_idx.add(pick)
        old = inv[tup.ustar]
        phi[old] = wk
        phi[v_new] = tup.ustar
        inv[wk] = old
        inv[tup.ustar] = v_new

        # invariant (a): the image is exactly phi0(T0) plus the absorbed hosts
        cur = T.vertex_order[: np_ + i + 1]
        snap = {v: phi[v] for v in cur}
        if set(snap.values()) != image0 | set(xs[: i + 1]):
            raise EmbedError(
                "image drifted from phi0(T0) plus the absorbed hosts", stage="absorb"
            )
        # invariant (b): one tuple spent per step
        if len(used_idx) > i + 1:
            raise EmbedError("more tuples spent than steps taken", stage="absorb")
        # invariant (c): unspent tuples keep their original preimages
        for j, t2 in enumerate(tuples_a):
            if j in used_idx:
                continue
            for u in t2.vertices:
                if inv.get(u) != inv0.get(u):
                    raise EmbedError(
                        f"unspent tuple {j} lost a preimage at host {u}",
                        stage="absorb",
                    )
        # edge preservation of the extended prefix
        if len(set(snap.values())) != len(snap):
            raise EmbedError("swap broke injectivity", stage="absorb")
        for e in T.edges:
            if all(v in snap for v in e):
                if not H.has_edge(tuple(snap[v] for v in e)):
                    raise EmbedError(
                        f"edge {e} lost its image in the swap for {target}",
                        stage="absorb",
                    )

    err = validate_embedding(H, T, phi)
    if err is not None:
        raise EmbedError(f"completion produced an invalid map: {err}", stage="absorb")
    return Embedding(T, H, phi)

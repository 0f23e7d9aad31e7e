"""Walk-anchored embedding of layered intervals, rooted subtrees, pseudopaths.

The trunk embedder maps an interval of a layered tree into the host so that
entry tuples land in F_1, exit tuples in F_2, and everything between stays
inside a prescribed pool U.  Walks of exactly the interval's length seed one
host candidate per layer; a backtracking assignment resolves collisions,
falling back on tuple components and neighbourhood scans whenever a walk's
suggestion is taken or absent.  On top of it, the subtree embedder runs the
three-stage pipeline (restrict and clean the partite blocks, push the trunk
through the reservoir from the pinned root tuple, extend greedily into the
parts) and gate-checks the four embedding clauses before returning.

Walk lengths follow the library convention: an interval of ranks [t, t+ell]
has ell + 1 layers, so a walk covering it one vertex per layer has edge count
ell - k + 2.
"""

from __future__ import annotations

import random
from math import comb

from .._bitset import bits, full_mask, mask_of
from ..errors import EmbedError, InvalidTreeError
from ..hypergraph import Hypergraph, Walk
from ..ktree import KTree, Layering, Pseudopath, build_ktree, flatten, reorder_by_layering
from .embedding import Embedding, validate_embedding
from .params import PipelineParams, min_ell
from .partite import clean_partite, extend_greedy
from .walks import connect

__all__ = ["egood_tuples", "embed_trunk", "embed_subtree", "embed_pseudopath"]


def egood_tuples(H: Hypergraph, e, within=None, cap=None) -> list:
    """Ordered partner tuples (x_1', ..., x_k') completing ``e`` to a copy of
    the complete k-partite k-graph with parts {e_i, x_i'} (e in sorted order).

    Partners are drawn from ``within`` and never from e itself.  Without a
    cap the list has exactly ``H.k22_count(e, within)`` entries; with one the
    enumeration stops early (lex-least assignments first).
    """
    k = H.k
    es = tuple(sorted(e))
    if not H.has_edge(es):
        raise ValueError(f"{es!r} is not an edge")
    base = full_mask(H.n) if within is None else mask_of(within)
    base &= ~mask_of(es)
    out: list = []
    chosen = [0] * k

    def rec(j: int, used: int) -> bool:
        if j == k:
            out.append(tuple(chosen))
            return cap is not None and len(out) >= cap
        cand = base & ~used
        for S in range(1 << j):
            if not cand:
                return False
            g = tuple(chosen[i] if S >> i & 1 else es[i] for i in range(k) if i != j)
            cand &= H.nbr_mask(g)
        for v in bits(cand):
            chosen[j] = v
            if rec(j + 1, used | (1 << v)):
                return True
        return False

    rec(0, 0)
    return out


def _dfs_walks(H: Hypergraph, f, fp, length: int, pool_mask: int, cap: int,
               node_budget: int) -> list:
    """Self-avoiding tight walks from f to fp of exact edge count ``length``,
    interior drawn from pool_mask.  Used for intervals too short for connect.
    """
    k = H.k
    f = tuple(f)
    fp = tuple(fp)
    total = length + k - 1
    if total < 2 * (k - 1) or set(f) & set(fp):
        return []
    seq: list = list(f) + [None] * (total - 2 * (k - 1)) + list(fp)
    pool = pool_mask & ~mask_of(f) & ~mask_of(fp)
    used0 = mask_of(f) | mask_of(fp)
    out: list = []
    budget = [node_budget]
    last_free = total - k  # positions k-1 .. last_free are interior

    def rec(i: int, used: int):
        if len(out) >= cap or budget[0] <= 0:
            return
        if i > last_free:
            for w in range(last_free - k + 2, length):
                win = seq[w : w + k]
                if not H.has_edge(win):
                    return
            out.append(Walk(k=k, seq=tuple(seq)))
            return
        prev = tuple(seq[i - k + 1 : i])
        for v in bits(H.nbr_mask(prev) & pool & ~used):
            budget[0] -= 1
            if budget[0] <= 0:
                return
            seq[i] = v
            if i - k + 1 < 0 or H.has_edge(seq[i - k + 1 : i + 1]):
                rec(i + 1, used | (1 << v))
            seq[i] = None
            if len(out) >= cap:
                return

    if last_free < k - 1:
        rec(last_free + 1, used0)
    else:
        rec(k - 1, used0)
    return out


def _assign(order, cand_fn, edge_close, edge_ok, phi0, used0: int, node_budget: int):
    """Backtracking host assignment.

    Vertices are taken in ``order``; cand_fn(v, phi, used) yields hosts to
    try; edge_close[v] lists the edges fully assigned once v is, each of
    which must pass edge_ok.  Returns the completed dict or None (search or
    budget exhausted).
    """
    phi = dict(phi0)
    budget = [node_budget]
    m = len(order)

    def rec(i: int, used: int) -> bool:
        if i == m:
            return True
        v = order[i]
        for w in cand_fn(v, phi, used):
            if budget[0] <= 0:
                return False
            budget[0] -= 1
            phi[v] = w
            if all(edge_ok(ed, phi) for ed in edge_close.get(v, ())) and rec(i + 1, used | (1 << w)):
                return True
            del phi[v]
        return False

    return phi if rec(0, used0) else None


def _sample(lst, cnt: int, rng: random.Random) -> list:
    if len(lst) <= cnt:
        return list(lst)
    return rng.sample(lst, cnt)


def embed_trunk(H: Hypergraph, T_I, t: int, ell: int, U, F_1, F_2, *,
                ranks=None, pinned=None, seed: int = 0, walk_cap: int = 4,
                node_budget: int = 200000) -> Embedding:
    """Embed the interval tree T_I (ranks t..t+ell) with entry tuples in F_1,
    exit tuples in F_2 and middle vertices inside U.

    ``ranks`` maps each vertex of T_I to its rank in [t, t+ell]; by default
    T_I's own layering is used, placed at offset t.  ``pinned`` pre-assigns
    hosts (the root, typically).  Entry/exit membership is enforced on every
    edge whose span starts at t or ends at t+ell: its rank-ordered (k-1)
    prefix resp. suffix must land on a tuple of F_1 resp. F_2.

    T_I = None gives the empty embedding.  Raises ValueError on malformed
    input and EmbedError (stage "trunk") when the search is exhausted.
    """
    k = H.k
    if ell < 2 * k + 1:
        raise ValueError(f"ell = {ell} below the minimum 2k+1 = {2 * k + 1}")
    F1list = sorted(set(tuple(x) for x in F_1))
    F2list = sorted(set(tuple(x) for x in F_2))
    if not F1list or not F2list:
        raise ValueError("F_1 and F_2 must be nonempty")
    if T_I is None:
        return Embedding(None, H, {})
    if T_I.k != k:
        raise ValueError(f"tree has k={T_I.k}, host has k={k}")

    if ranks is None:
        L0 = flatten(T_I, T_I.vertex_order[: k - 1])
        ranks = {v: t - 1 + L0.rank(v) for v in T_I.vertex_order}
    else:
        ranks = dict(ranks)
    for v in T_I.vertex_order:
        if v not in ranks or not t <= ranks[v] <= t + ell:
            raise ValueError(f"vertex {v} has no rank inside [{t}, {t + ell}]")
    evr = {}
    for ed in T_I.edges:
        rs = sorted(ranks[v] for v in ed)
        if len(set(rs)) != k or rs[-1] - rs[0] != k - 1:
            raise ValueError(f"edge {ed} does not span {k} consecutive ranks")
        evr[ed] = tuple(sorted(ed, key=ranks.get))

    pinned = dict(pinned or {})
    for v in pinned:
        if v not in ranks:
            raise ValueError(f"pinned vertex {v} is not in T_I")
    if len(set(pinned.values())) != len(pinned):
        raise ValueError("pinned hosts collide")

    mid_lo, mid_hi = t + k - 1, t + ell - k + 1
    end_lo = t + ell - k + 2
    U_eff = set(U) - set(pinned.values())
    U_mask = mask_of(U_eff)
    F1set = frozenset(F1list)
    F2set = frozenset(F2list)

    def edge_ok(ed, phi) -> bool:
        vs = evr[ed]
        if not H.has_edge([phi[v] for v in vs]):
            return False
        if ranks[vs[0]] == t and tuple(phi[v] for v in vs[:-1]) not in F1set:
            return False
        if ranks[vs[-1]] == t + ell and tuple(phi[v] for v in vs[1:]) not in F2set:
            return False
        return True

    order = [v for v in T_I.vertex_order if v not in pinned]
    pos = {v: i for i, v in enumerate(order)}
    edge_close: dict = {}
    used0 = mask_of(pinned.values())
    for ed in T_I.edges:
        free = [v for v in ed if v in pos]
        if free:
            edge_close.setdefault(max(free, key=pos.get), []).append(ed)
        elif not edge_ok(ed, pinned):
            raise ValueError(f"pinned hosts violate edge {ed}")

    # One tuple per rank of the start window means the entry tuple is forced;
    # walks are then only requested from it.
    at_rank: dict = {}
    for v in T_I.vertex_order:
        at_rank.setdefault(ranks[v], []).append(v)
    s_vec = None
    if all(len(at_rank.get(t + i, [])) == 1 and at_rank[t + i][0] in pinned
           for i in range(k - 1)):
        s_vec = tuple(pinned[at_rank[t + i][0]] for i in range(k - 1))
        if s_vec not in F1set:
            raise ValueError(f"pinned entry tuple {s_vec} is not in F_1")

    rng = random.Random(seed)
    starts = [s_vec] if s_vec is not None else _sample(F1list, 4, rng)
    ends = _sample(F2list, 8, rng)
    pairs = [(a, b) for a in starts for b in ends if not set(a) & set(b)]
    rng.shuffle(pairs)
    ell_walk = ell - k + 2
    avoid = set(pinned.values())
    walks: list = []
    for f1, f2 in pairs:
        if len(walks) >= walk_cap:
            break
        try:
            if ell_walk >= min_ell(k):
                got = connect(H, f1, f2, ell_walk, U_eff,
                              avoid=avoid - set(f1) - set(f2), cap=1,
                              node_budget=max(node_budget // 4, 10000))
            else:
                pm = U_mask & ~mask_of(avoid)
                got = _dfs_walks(H, f1, f2, ell_walk, pm, 1,
                                 max(node_budget // 4, 10000))
        except ValueError:
            continue
        walks.extend(got)

    anchors = T_I.anchors

    def make_cand_fn(walk):
        def cand_fn(v, phi, used):
            rho = ranks[v]
            out: list = []
            seen = set()

            def add(w):
                if w is None or w in seen or used >> w & 1:
                    return
                if mid_lo <= rho <= mid_hi and not U_mask >> w & 1:
                    return
                seen.add(w)
                out.append(w)

            if walk is not None:
                add(walk.seq[rho - t])
            if rho < mid_lo:
                for tup in F1list:
                    add(tup[rho - t])
            elif rho > mid_hi:
                for tup in F2list:
                    add(tup[rho - end_lo])
            else:
                anc = anchors.get(v)
                if anc is not None and all(u in phi for u in anc):
                    nb = H.nbr_mask(tuple(phi[u] for u in anc))
                else:
                    nb = full_mask(H.n)
                for w in bits(nb & U_mask & ~used):
                    add(w)
            return out

        return cand_fn

    for walk in walks + [None]:
        phi = _assign(order, make_cand_fn(walk), edge_close, edge_ok,
                      pinned, used0, node_budget)
        if phi is None:
            continue
        if validate_embedding(H, T_I, phi) is None and all(
            edge_ok(ed, phi) for ed in T_I.edges
        ):
            return Embedding(T_I, H, phi)
    raise EmbedError(
        f"no assignment for the interval [{t}, {t + ell}] after "
        f"{len(walks)} walk-seeded attempts",
        stage="trunk",
    )


def _is_extensible(H: Hypergraph, e, theta: float) -> bool:
    return H.k22_count(e) >= theta * comb(H.n - H.k, H.k)


def embed_subtree(H: Hypergraph, R, W_parts, T: KTree, r, L: Layering, e, f,
                  r_vec, f_vec, params: PipelineParams, *,
                  node_budget: int = 200000) -> Embedding:
    """Embed the rooted tree (T, r) with root image f_vec, lower layers in the
    reservoir and crown layers in the parts W_1..W_k.

    The returned embedding phi satisfies, and is gate-checked for:
      E1  phi(r_vec) = f_vec componentwise;
      E2  phi^{-1}(R union f) is exactly the union of the first ell layers;
      E3  |phi^{-1}(W_1)| >= ... >= |phi^{-1}(W_k)|;
      E4  every tree edge mapped into the parts is theta-extensible.

    f must be k-1 vertices of the theta-extensible edge e; r must be the root
    of the layering L.  Raises ValueError on precondition violations and
    EmbedError (stage "subtree") when all retries fail.
    """
    k = H.k
    if T.k != k:
        raise ValueError(f"tree has k={T.k}, host has k={k}")
    r_vec = tuple(r_vec)
    f_vec = tuple(f_vec)
    es = tuple(sorted(e))
    if not H.has_edge(es):
        raise ValueError(f"{es!r} is not an edge")
    if set(r_vec) != set(r) or len(r_vec) != k - 1:
        raise ValueError("r_vec is not an ordering of r")
    if tuple(sorted(r)) != L.root:
        raise ValueError("L is not rooted at r")
    if set(f_vec) != set(f) or len(f_vec) != k - 1 or not set(f) < set(es):
        raise ValueError("f_vec must order a (k-1)-subset f of e")
    if not _is_extensible(H, es, params.theta):
        raise ValueError(f"edge {es!r} is not theta-extensible")
    if params.beta is not None and T.n > params.beta * H.n:
        raise ValueError(f"tree order {T.n} exceeds beta*n = {params.beta * H.n:.1f}")

    W_parts = [tuple(sorted(W)) for W in W_parts]
    if len(W_parts) != k:
        raise ValueError(f"expected {k} parts, got {len(W_parts)}")
    union_W = set()
    for W in W_parts:
        if union_W & set(W):
            raise ValueError("parts overlap")
        union_W |= set(W)

    ell = params.ell_for(k)
    depth = L.depth

    # sigma: class c collects layers ell+c, ell+c+k, ...; the largest class
    # is assigned to W_1 so the part sizes come out non-increasing.
    class_size = [0] * k
    for v in T.vertex_order:
        rho = L.rank(v)
        if rho > ell:
            class_size[(rho - ell - 1) % k] += 1
    by_size = sorted(range(k), key=lambda c: (-class_size[c], c))
    parts_sigma = [()] * k
    for j, c in enumerate(by_size):
        parts_sigma[c] = W_parts[j]
    sigma_pos = {v: i for i, W in enumerate(parts_sigma) for v in W}

    crown = depth > ell
    Hp = None
    if crown:
        thr = params.theta * comb(H.n - k, k)
        ctx_edges = []
        for e2 in H.edges:
            ps = set()
            ok = True
            for v in e2:
                p = sigma_pos.get(v)
                if p is None or p in ps:
                    ok = False
                    break
                ps.add(p)
            if ok and H.k22_count(e2) >= thr:
                ctx_edges.append(e2)
        if not ctx_edges:
            raise EmbedError("no theta-extensible partite edge between the parts",
                             stage="clean")
        Hpp = Hypergraph(k, H.n, ctx_edges)
        m = max(len(W) for W in W_parts)
        d_cl = 0.5 * len(ctx_edges) / m ** k
        Hp = clean_partite(Hpp, parts_sigma, d_cl)

    cutoff = ell + k - 1
    e_mask = mask_of(es)
    R_verts = set(R.members)
    pinned = dict(zip(r_vec, f_vec))

    # exit targets: cleaned edges minus their last-part vertex, ordered by part
    F2list: list = []
    if Hp is not None:
        last_part = set(parts_sigma[k - 1])
        F2set = set()
        for e2 in Hp.edges:
            g = tuple(sorted((v for v in e2 if v not in last_part),
                             key=sigma_pos.get))
            F2set.add(g)
        F2list = sorted(F2set)

    T1 = None
    ranks1 = None
    if depth >= cutoff and F2list:
        pe = [ed for ed in L._order
              if max(L.rank(v) for v in ed) <= cutoff]
        vs = set()
        for ed in pe:
            vs.update(ed)
        try:
            T1 = build_ktree(k, len(vs), pe, ordered=False)
            ranks1 = {v: L.rank(v) for v in vs}
        except InvalidTreeError:
            T1 = None

    F1list: list = []
    if T1 is not None:
        rank_root = {L.rank(v): v for v in r_vec}
        if sorted(rank_root) != list(range(1, k)):
            raise ValueError("root does not occupy one vertex in each of the first k-1 layers")
        s_vec = tuple(pinned[rank_root[i]] for i in range(1, k))
        cidx = [es.index(h) for h in s_vec]
        F1 = {s_vec}
        for xp in egood_tuples(H, es, within=R_verts, cap=128):
            for S in range(1 << (k - 1)):
                F1.add(tuple(xp[cidx[j]] if S >> j & 1 else s_vec[j]
                             for j in range(k - 1)))
        F1list = sorted(F1)

    U_trunk = R_verts - set(es)

    def run_regime_a(sd: int) -> dict:
        phi1 = embed_trunk(H, T1, 1, cutoff - 1, U_trunk, F1list, F2list,
                           ranks=ranks1, pinned=pinned, seed=sd,
                           walk_cap=params.walk_cap, node_budget=node_budget)
        return extend_greedy(Hp, parts_sigma, T, L, ell, phi1.phi, host=H).phi

    Tw = reorder_by_layering(T, L)
    base = tuple(Tw.vertex_order[:k])
    base_set = set(base)
    R_mask = mask_of(R_verts) & ~e_mask
    part_masks = [mask_of(W) & ~e_mask for W in parts_sigma]

    def run_regime_b(sd: int) -> dict:
        rng = random.Random(sd)
        order = [v for v in Tw.vertex_order if v not in pinned]
        pos = {v: i for i, v in enumerate(order)}
        edge_close: dict = {}
        for ed in Tw.edges:
            free = [v for v in ed if v in pos]
            if free:
                edge_close.setdefault(max(free, key=pos.get), []).append(ed)
            elif not H.has_edge([pinned[v] for v in ed]):
                raise EmbedError(f"root image misses the edge {ed}", stage="subtree")

        def edge_ok(ed, phi) -> bool:
            return H.has_edge([phi[v] for v in ed])

        def cand_fn(v, phi, used):
            rho = L.rank(v)
            if rho <= ell:
                region = R_mask
            else:
                region = part_masks[(rho - ell - 1) % k]
            anc = Tw.anchors.get(v)
            if anc is None and v in base_set:
                anc = tuple(u for u in base if u != v)
            nb = full_mask(H.n)
            if anc is not None and all(u in phi for u in anc):
                img = tuple(phi[u] for u in anc)
                if rho > ell and Hp is not None and all(u in union_W for u in img):
                    nb = Hp.nbr_mask(img)
                else:
                    nb = H.nbr_mask(img)
            got = list(bits(nb & region & ~used))
            if sd:
                rng.shuffle(got)
            return got

        phi = _assign(order, cand_fn, edge_close, edge_ok, pinned,
                      mask_of(pinned.values()), node_budget)
        if phi is None:
            raise EmbedError("assignment search exhausted", stage="subtree")
        return phi

    def clause_err(phi) -> str | None:
        if tuple(phi[v] for v in r_vec) != f_vec:
            return "E1: root image differs from f_vec"
        r_or_f = R_verts | set(f_vec)
        low = {v for v in T.vertex_order if L.rank(v) <= ell}
        hit = {v for v in T.vertex_order if phi[v] in r_or_f}
        if hit != low:
            off = (hit ^ low).pop()
            return f"E2: vertex {off} (layer {L.rank(off)}) on the wrong side"
        img = set(phi.values())
        counts = [len(img & set(W)) for W in W_parts]
        if any(counts[i] < counts[i + 1] for i in range(k - 1)):
            return f"E3: part usage {counts} is not non-increasing"
        for ed in T.edges:
            ie = tuple(sorted(phi[v] for v in ed))
            if set(ie) <= union_W and not _is_extensible(H, ie, params.theta):
                return f"E4: crown edge {ed} lands on non-extensible {ie}"
        return None

    last = "no attempt made"
    for a in range(params.retry_cap + 1):
        sd = params.seed + 7919 * a
        try:
            phi = run_regime_a(sd) if T1 is not None else run_regime_b(sd)
        except EmbedError as ex:
            last = str(ex)
            continue
        err = validate_embedding(H, T, phi) or clause_err(phi)
        if err is None:
            return Embedding(T, H, phi)
        last = err
    raise EmbedError(
        f"subtree embedding failed after {params.retry_cap + 1} attempts: {last}",
        stage="subtree",
    )


def embed_pseudopath(H: Hypergraph, P: Pseudopath, x, y, *, within=None,
                     seed: int = 0, node_budget: int = 200000) -> Embedding:
    """Embed the pseudopath P with phi(P.f) = x and phi(P.fp) = y,
    componentwise against the sorted endpoint tuples.

    Interior hosts come from ``within`` (default: the whole host).  The
    chain structure makes a plain anchored backtracking complete: each edge
    past the first introduces one vertex whose anchor lies in the previous
    edge, so candidates are neighbourhood bits throughout.  A nonzero seed
    shuffles candidate order (used by retry loops); seed 0 is lex-least.
    """
    k = H.k
    if P.k != k:
        raise ValueError(f"pseudopath has k={P.k}, host has k={k}")
    x = tuple(x)
    y = tuple(y)
    for name, tup in (("x", x), ("y", y)):
        if len(tup) != k - 1 or len(set(tup)) != k - 1:
            raise ValueError(f"{name} = {tup!r} is not a ({k - 1})-tuple")
        for w in tup:
            if not 0 <= w < H.n:
                raise ValueError(f"{name} contains {w}, outside the host")
    if set(x) & set(y):
        raise ValueError("x and y overlap")

    pinned: dict = {}
    for v, w in list(zip(P.f, x)) + list(zip(P.fp, y)):
        if pinned.get(v, w) != w:
            raise ValueError(f"endpoint pins conflict on vertex {v}")
        pinned[v] = w
    if len(set(pinned.values())) != len(pinned):
        raise ValueError("endpoint pins collide in the host")

    order: list = []
    seen = set()
    for ed in P.edges:
        for v in ed:
            if v not in seen:
                seen.add(v)
                if v not in pinned:
                    order.append(v)
    anchor: dict = {}
    first = P.edges[0]
    for v in first:
        anchor[v] = tuple(u for u in first if u != v)
    covered = set(first)
    for ed in P.edges[1:]:
        (v,) = set(ed) - covered
        anchor[v] = tuple(u for u in ed if u != v)
        covered |= set(ed)

    pos = {v: i for i, v in enumerate(order)}
    edge_close: dict = {}
    for ed in P.edges:
        free = [v for v in ed if v in pos]
        if free:
            edge_close.setdefault(max(free, key=pos.get), []).append(ed)
        elif not H.has_edge([pinned[v] for v in ed]):
            raise EmbedError(f"pinned endpoints miss the edge {ed}",
                             stage="pseudopath")

    pool = full_mask(H.n) if within is None else mask_of(within)
    pool |= mask_of(pinned.values())
    rng = random.Random(seed)

    def edge_ok(ed, phi) -> bool:
        return H.has_edge([phi[v] for v in ed])

    def cand_fn(v, phi, used):
        anc = anchor[v]
        if all(u in phi for u in anc):
            nb = H.nbr_mask(tuple(phi[u] for u in anc))
        else:
            nb = full_mask(H.n)
        got = list(bits(nb & pool & ~used))
        if seed:
            rng.shuffle(got)
        return got

    phi = _assign(order, cand_fn, edge_close, edge_ok, pinned,
                  mask_of(pinned.values()), node_budget)
    if phi is None:
        raise EmbedError(
            f"no embedding of the {P.distance}-edge pseudopath with the given pins",
            stage="pseudopath",
        )
    emb = Embedding(P.as_ktree(), H, phi)
    emb.check()
    return emb

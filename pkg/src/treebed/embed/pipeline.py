"""Top-level driver: embed a spanning tight k-tree into a host.

Three methods are offered.  ``hybrid`` (the default) runs the staged
pipeline with desk-scale adjustments and falls back to the exhaustive
oracle whenever a stage fails, so it is the method that actually embeds
things at the sizes this package runs.  ``strict`` keeps every stage
precondition at full strength and never falls back; it exists to report
exactly which requirement breaks first at a given scale.  ``brute`` is
the oracle alone.

Whatever the route, a returned embedding has passed the validator; a
failed run raises EmbedError whose ``stage`` names the point of failure.
An optional ``report`` dict is filled in place with per-stage timings
and diagnostics so that experiments can log what happened.
"""

from __future__ import annotations

import random
import time
from itertools import islice
from math import comb

from .._bitset import bits
from ..density import Sampled, Typical, density_check
from ..errors import EmbedError, InvalidTreeError
from ..hypergraph import Hypergraph
from ..ktree import (
    KTree,
    build_ktree,
    decompose_beta_d,
    find_separated_xfamily,
    flatten,
    induced_subtree,
)
from .absorb import (
    AbsorbingTuple,
    absorb_complete,
    cover_embedding,
    is_x_covered,
    select_absorbing_family,
)
from .embedding import Embedding, validate_embedding
from .oracle import brute_force_embed
from .params import PipelineParams
from .reservoir import Reservoir, sample_reservoir
from .trunk import embed_subtree

__all__ = ["embed_spanning"]

_METHODS = ("hybrid", "strict", "brute")


def _now_ms() -> float:
    return time.monotonic() * 1000.0


def _ext_threshold(H: Hypergraph, theta: float) -> float:
    return theta * comb(H.n - H.k, H.k)


def _first_extensible(H: Hypergraph, theta: float, cap: int = 4000):
    """Lazy scan for a theta-extensible edge; None if the prefix has none."""
    thr = _ext_threshold(H, theta)
    for e in islice(H.edges, cap):
        if H.k22_count(e) >= thr:
            return e
    return None


def _root_edge(H: Hypergraph, f_vec, theta: float, free):
    """A theta-extensible edge containing f, preferring a free k-th vertex."""
    fs = tuple(sorted(f_vec))
    thr = _ext_threshold(H, theta)
    backup = None
    for w in bits(H.nbr_mask(fs)):
        e = tuple(sorted(fs + (w,)))
        if H.k22_count(e) >= thr:
            if w in free:
                return e
            if backup is None:
                backup = e
    return backup


def _fixed_partition(n: int, k: int):
    """Deterministic balanced split: vertex v goes to part v mod k."""
    return [tuple(range(j, n, k)) for j in range(k)]


def _prefix_tree(T: KTree, q: int) -> KTree:
    vs = set(T.vertex_order[:q])
    pe = [e for e in T.edges if all(v in vs for v in e)]
    return build_ktree(T.k, q, pe, ordered=False)


def _single_edge_x(k: int) -> KTree:
    return build_ktree(k - 1, k - 1, [tuple(range(k - 1))])


def _leaf_tuples(T: KTree, exclude):
    """(us..., v*) for every degree-1 vertex outside ``exclude``."""
    out = []
    excl = set(exclude)
    for w in sorted(T.vertex_order):
        if w in excl or T.degree(w) != 1:
            continue
        (e,) = T.edges_through(w)
        out.append(tuple(sorted(set(e) - {w})) + (w,))
    return tuple(out)


def _rule_beta_d(t: int, delta: int):
    # Per-tree choice: the deep split only pays off once the part bound
    # 2*delta^d/beta is comfortably below the edge count.
    if t >= 2 * delta * delta / 0.3:
        return 0.3, 2
    if t >= 4 * delta:
        return 0.5, 1
    return 1.0, 1


def _resolve_beta_d(params: PipelineParams, t: int, delta: int, ell: int):
    rb, rd = _rule_beta_d(t, delta)
    beta = params.beta if params.beta is not None else rb
    d = params.d if params.d is not None else rd
    return beta, d


def _reservoir_shim(members, params: PipelineParams, h: int) -> Reservoir:
    return Reservoir(members=tuple(members), gamma=params.gamma, mu=params.mu,
                     h=h, seed=params.seed, attempts=0, verified={}, worst={})


def _chain_parts(H, dec, R_members, W_parts, params, phi, used, deadline):
    """Embed decomposition parts in order, pinning each root to its image.

    ``phi``/``used`` are mutated.  Parts whose vertices are all embedded
    already are skipped; a part embedded beyond its root is an error, since
    embed_subtree can only pin the root.
    """
    for idx, part in enumerate(dec.parts):
        if _now_ms() > deadline:
            raise EmbedError("timed out while chaining decomposition parts",
                             stage="almost")
        if all(v in phi for v in part.tree.vertex_order):
            continue
        r = part.root
        missing = [v for v in r if v not in phi]
        if missing:
            raise EmbedError(
                f"part {idx} root {r} has unembedded vertices {missing}",
                stage="almost")
        stray = [v for v in part.tree.vertex_order
                 if v in phi and v not in set(r)]
        if stray:
            raise EmbedError(
                f"part {idx} is already embedded beyond its root at {stray}",
                stage="almost")
        L = part.layering
        r_vec = tuple(sorted(r, key=L.rank))
        f_vec = tuple(phi[v] for v in r_vec)
        fset = set(f_vec)
        free = set(range(H.n)) - used
        e = _root_edge(H, f_vec, params.theta, free)
        if e is None:
            raise EmbedError(
                f"no theta-extensible edge through the root image {f_vec}",
                stage="almost")
        Rm = tuple(v for v in R_members if v not in used)
        shim = _reservoir_shim(Rm, params, H.k - 1)
        Wp = [tuple(v for v in W if v not in used and v not in fset)
              for W in W_parts]
        emb = embed_subtree(H, shim, Wp, part.tree, r, L, e, fset,
                            r_vec, f_vec, params)
        for v, w in emb.phi.items():
            if v not in phi:
                phi[v] = w
                used.add(w)
    return phi


def _direct_complete(H, T, phi0, leftovers, free):
    """Greedy-with-backtracking assignment of the leftover tree vertices.

    Each leftover must take one of the unused host vertices; an edge is
    checked as soon as its last leftover is placed.  Returns the completed
    map or None.
    """
    pos = {v: i for i, v in enumerate(leftovers)}
    close: dict = {v: [] for v in leftovers}
    for e in T.edges:
        lv = [v for v in e if v in pos]
        if lv:
            close[max(lv, key=pos.get)].append(e)
    phi = dict(phi0)
    free = list(free)
    taken = [False] * len(free)

    def go(i: int) -> bool:
        if i == len(leftovers):
            return True
        v = leftovers[i]
        for j, w in enumerate(free):
            if taken[j]:
                continue
            phi[v] = w
            if all(H.has_edge(tuple(phi[u] for u in e)) for e in close[v]):
                taken[j] = True
                if go(i + 1):
                    return True
                taken[j] = False
            del phi[v]
        return False

    return phi if go(0) else None


def _finish_brute(H, T, params, report, deadline, stage):
    rem = max(200, int(deadline - _now_ms()))
    t0 = _now_ms()
    res = brute_force_embed(H, T, timeout_ms=rem)
    report["stages"][stage] = {
        "time_ms": round(_now_ms() - t0, 2),
        "nodes": res.nodes,
        "status": res.status,
    }
    if res.found:
        emb = res.embedding
        err = validate_embedding(H, T, emb.phi)
        if err is not None:
            raise EmbedError(f"oracle returned an invalid embedding: {err}",
                             stage=stage)
        report["validated"] = True
        return emb
    if res.status == "absent":
        report["proven_absent"] = True
        raise EmbedError("no spanning embedding exists (oracle search exhausted)",
                         stage=stage)
    raise EmbedError("all strategies exhausted within the timeout", stage=stage)


def embed_spanning(H: Hypergraph, T: KTree, params: PipelineParams | None = None,
                   method: str = "hybrid", report: dict | None = None) -> Embedding:
    """Embed the spanning tree T into H, or raise EmbedError.

    ``method`` is one of "hybrid", "strict", "brute".  ``report``, when
    given, receives stage timings, the fallback record and diagnostics.
    """
    if params is None:
        params = PipelineParams()
    if report is None:
        report = {}
    if method not in _METHODS:
        raise ValueError(f"unknown method {method!r}, expected one of {_METHODS}")
    if T.k != H.k:
        raise ValueError(f"uniformity mismatch: host {H.k}, tree {T.k}")
    if T.n != H.n:
        raise ValueError(
            f"spanning embedder needs |V(T)| = |V(H)|, got {T.n} and {H.n}")

    report.update(method=method, k=H.k, n=H.n, stages={}, fallback=None,
                  retries=0)
    deadline = _now_ms() + params.timeout_ms

    if method == "brute":
        return _finish_brute(H, T, params, report, deadline, stage="brute")
    if method == "hybrid" and (H.k == 2 or H.n <= H.k + 2):
        # Graphs and near-trivial orders: the oracle is exact and instant,
        # and the staged machinery has nothing to contribute.
        report["route"] = "brute"
        return _finish_brute(H, T, params, report, deadline, stage="brute")
    if method == "strict":
        return _strict(H, T, params, report, deadline)
    return _hybrid(H, T, params, report, deadline)


# -- hybrid ---------------------------------------------------------------


def _hybrid(H, T, params, report, deadline):
    k, n = H.k, H.n
    stages = report["stages"]

    def fail(stage, exc):
        report["retries"] += 1
        report["fallback"] = {"stage": stage, "reason": str(exc)}
        return _finish_brute(H, T, params, report, deadline, stage="fallback")

    # family: pick the tuple class X used for absorption.  Host-side
    # absorbing tuples are derived after the prefix is embedded, so only
    # the tree side is fixed here.
    t0 = _now_ms()
    X = None
    fam_tuples = ()
    class_size = 0
    try:
        fam = find_separated_xfamily(T, 1, exclude=T.vertex_order[:k])
        X, fam_tuples, class_size = fam.X, fam.tuples, fam.class_size
    except (InvalidTreeError, ValueError):
        pass
    if X is None or not fam_tuples:
        X = _single_edge_x(k)
        fam_tuples = _leaf_tuples(T, exclude=T.vertex_order[:k])
        class_size = len(fam_tuples)
    stages["family"] = {"time_ms": round(_now_ms() - t0, 2), "h": X.n,
                        "tuples": len(fam_tuples), "class_size": class_size}

    m = max(1, int(round(params.alpha * n / 2)))
    m = min(m, n - (k + 1))

    # reservoir: sampled but not fully verified; the leftover hosts simply
    # tend to land here because the chain avoids it while it can.
    t0 = _now_ms()
    try:
        Rv = sample_reservoir(H, params.gamma, params.mu, h=X.n,
                              seed=params.seed, require=("size",))
    except (EmbedError, ValueError) as ex:
        return fail("reservoir", ex)
    stages["reservoir"] = {"time_ms": round(_now_ms() - t0, 2),
                           "size": Rv.size, "verified": dict(Rv.verified)}

    # partition: fixed balanced split, certified by a sampled typicality
    # check.  At this scale a failed certificate is recorded, not fatal.
    t0 = _now_ms()
    W_parts = _fixed_partition(n, k)
    rho = len(H.edges) / comb(n, k)
    drep = density_check(H, Typical(rho, 2, 0.3), Sampled(200, seed=params.seed))
    stages["partition"] = {"time_ms": round(_now_ms() - t0, 2),
                           "certified": drep.passed,
                           "worst_slack": drep.worst_slack}

    # decompose the prefix tree
    t0 = _now_ms()
    try:
        T0 = _prefix_tree(T, n - m)
        te = len(T0.edges)
        delta = T.delta1
        beta, d = _resolve_beta_d(params, te, delta, params.ell_for(k))
        r0 = tuple(sorted(T0.vertex_order[:k - 1]))
        L0 = flatten(T0, r0)
        dec = decompose_beta_d(T0, r0, L0, beta, d)
    except (InvalidTreeError, ValueError) as ex:
        return fail("decompose", ex)
    stages["decompose"] = {"time_ms": round(_now_ms() - t0, 2),
                           "beta": beta, "d": d, "parts": len(dec.parts),
                           "bound": 2 * delta ** d / beta,
                           "max_part": max(len(p.tree.edges) for p in dec.parts)}

    # almost: structured chain first, pinned oracle on the prefix second
    t0 = _now_ms()
    phi = None
    path = "structured"
    chain_error = None
    e0 = _first_extensible(H, params.theta)
    if e0 is not None:
        r1 = dec.parts[0].root
        L1 = dec.parts[0].layering
        r_vec = tuple(sorted(r1, key=L1.rank))
        f_vec = tuple(sorted(e0)[:k - 1])
        trial = dict(zip(r_vec, f_vec))
        used = set(f_vec)
        try:
            phi = _chain_parts(H, dec, Rv.members, W_parts, params,
                               trial, used, deadline)
        except (EmbedError, ValueError) as ex:
            chain_error = str(ex)
            phi = None
    else:
        chain_error = "no theta-extensible edge in the host"
    if phi is not None and validate_embedding(H, T0, phi) is not None:
        chain_error = "chained embedding failed validation"
        phi = None
    if phi is None:
        path = "oracle"
        report["retries"] += 1
        budget = max(500, int((deadline - _now_ms()) * 0.5))
        res = brute_force_embed(H, T0, timeout_ms=budget)
        if res.status == "embedded":
            phi = dict(res.embedding.phi)
        elif res.status == "absent":
            # the prefix is an induced subtree, so its absence settles T
            report["proven_absent"] = True
            stages["almost"] = {"time_ms": round(_now_ms() - t0, 2),
                                "path": path, "chain_error": chain_error}
            raise EmbedError(
                "the prefix tree has no embedding, hence neither has T "
                "(oracle search exhausted)", stage="almost")
        else:
            return fail("almost", EmbedError(
                f"structured chain failed ({chain_error}) and the oracle "
                "timed out on the prefix", stage="almost"))
    stages["almost"] = {"time_ms": round(_now_ms() - t0, 2), "path": path,
                        "chain_error": chain_error}

    # derive covered absorbing tuples from the embedded prefix
    t0 = _now_ms()
    pset = set(T.vertex_order[:n - m])
    cands = []
    taken: set = set()
    for tup in fam_tuples:
        if any(v not in pset for v in tup):
            continue
        if any(not set(e) <= pset for e in T.edges_through(tup[-1])):
            continue
        hv = tuple(phi[v] for v in tup)
        if set(hv) & taken:
            continue
        at = AbsorbingTuple(us=hv[:-1], ustar=hv[-1])
        if not is_x_covered(T, X, phi, at):
            continue
        cands.append(at)
        taken |= set(hv)
    stages["family"]["derived"] = len(cands)

    # complete: direct placement of the m leftovers
    leftovers = list(T.vertex_order[n - m:])
    free = sorted(set(range(n)) - set(phi.values()))
    full = _direct_complete(H, T, phi, leftovers, free)
    stages["complete"] = {"time_ms": round(_now_ms() - t0, 2),
                          "leftovers": m, "direct": full is not None}
    if full is not None:
        err = validate_embedding(H, T, full)
        if err is None:
            report["validated"] = True
            return Embedding(T, H, full)
        stages["complete"]["direct"] = False

    # absorb: swap the leftovers in via the derived covered tuples
    t0 = _now_ms()
    if not cands:
        return fail("absorb", EmbedError(
            "no covered absorbing tuples available for completion",
            stage="absorb"))
    try:
        emb = absorb_complete(H, T, T0, phi, X, cands)
    except (EmbedError, ValueError) as ex:
        return fail("absorb", ex)
    stages["absorb"] = {"time_ms": round(_now_ms() - t0, 2), "swaps": m,
                        "tuples": len(cands)}
    err = validate_embedding(H, T, emb.phi)
    if err is not None:
        return fail("absorb", EmbedError(f"absorbed map invalid: {err}",
                                         stage="absorb"))
    report["validated"] = True
    return emb


# -- strict ---------------------------------------------------------------


def _strict(H, T, params, report, deadline):
    """The staged pipeline with full-strength preconditions and no fallback.

    Raises EmbedError naming the first stage whose requirement cannot be
    met; at desk scales that is normally the separated family or the
    verified reservoir.
    """
    k, n = H.k, H.n
    stages = report["stages"]
    ell = params.ell_for(k)
    delta = T.delta1
    sep = 2 * delta * k * (ell + 3 * k)
    m = max(1, int(round(params.alpha * n / 2)))
    m = min(m, n - (k + 1))
    tail = set(T.vertex_order[n - m:])

    # family: absorber subtree in the size window, separated family on it,
    # host-side family, cover embedding
    t0 = _now_ms()
    L = flatten(T, tuple(sorted(T.vertex_order[:k - 1])))
    lo = max(1, -(-int(params.alpha * n) // delta))
    hi = max(1, int(params.alpha * n))
    cand_roots = sorted({x for e in T.edges
                         for x in ( tuple(sorted(set(e) - {v})) for v in e )
                         if L.is_layered(x)})
    pick = None
    for x in cand_roots:
        sl = induced_subtree(T, x, L)
        if sl.empty or not (lo <= sl.edge_count <= hi):
            continue
        if set(sl.tree.vertex_order) & tail:
            continue
        pick = (x, sl)
        break
    if pick is None:
        raise EmbedError(
            f"no absorber subtree with edge count in [{lo}, {hi}] clear of "
            "the leftover tail", stage="family")
    x, sl = pick
    Tx = sl.tree
    B = find_separated_xfamily(Tx, sep, exclude=x)
    if not B.tuples:
        raise EmbedError("separated family on the absorber subtree is empty",
                         stage="family")
    A = select_absorbing_family(H, B.X, params.alpha, params.seed)
    A_used = list(A.tuples)[:len(B.tuples)]
    m = min(m, len(A_used))
    if m < 1:
        raise EmbedError("empty absorbing family", stage="family")
    e0 = _first_extensible(H, params.theta)
    if e0 is None:
        raise EmbedError("no theta-extensible edge in the host", stage="family")
    f0 = tuple(sorted(e0)[:k - 1])
    stages["family"] = {"time_ms": round(_now_ms() - t0, 2), "h": B.X.n,
                        "tree_tuples": len(B.tuples), "host_tuples": len(A_used),
                        "separation": sep, "subtree_edges": sl.edge_count}

    t0 = _now_ms()
    cov = cover_embedding(H, A_used, Tx, B, x, f0)
    phi = dict(cov.phi)
    used = set(phi.values())
    stages["cover"] = {"time_ms": round(_now_ms() - t0, 2),
                       "vertices": len(phi)}

    # reservoir with every verification required
    t0 = _now_ms()
    Rv = sample_reservoir(H, params.gamma, params.mu, h=B.X.n,
                          seed=params.seed)
    stages["reservoir"] = {"time_ms": round(_now_ms() - t0, 2),
                           "size": Rv.size, "verified": dict(Rv.verified)}

    # partition must certify
    t0 = _now_ms()
    W_parts = _fixed_partition(n, k)
    rho = len(H.edges) / comb(n, k)
    drep = density_check(H, Typical(rho, 2, 0.3), Sampled(200, seed=params.seed))
    stages["partition"] = {"time_ms": round(_now_ms() - t0, 2),
                           "certified": drep.passed,
                           "worst_slack": drep.worst_slack}
    if not drep.passed:
        raise EmbedError(
            f"partition density certificate failed (worst slack "
            f"{drep.worst_slack:.4f})", stage="partition")

    # decompose the prefix minus the covered subtree, rooted at its base
    t0 = _now_ms()
    T0 = _prefix_tree(T, n - m)
    interior = set(Tx.vertices) - set(x)
    rest_edges = [e for e in T0.edges if e not in set(Tx.edges)]
    rest_vs = {v for e in rest_edges for v in e}
    if interior & rest_vs:
        raise EmbedError("absorber subtree is not hanging cleanly",
                         stage="decompose")
    Trest = build_ktree(k, len(rest_vs), rest_edges, ordered=False)
    beta = params.beta if params.beta is not None else 0.1
    d = params.d if params.d is not None else ell
    rr = tuple(sorted(Trest.vertex_order[:k - 1]))
    Lr = flatten(Trest, rr)
    dec = decompose_beta_d(Trest, rr, Lr, beta, d)
    stages["decompose"] = {"time_ms": round(_now_ms() - t0, 2), "beta": beta,
                           "d": d, "parts": len(dec.parts)}

    # chain the parts, roots pinned from what is embedded so far
    t0 = _now_ms()
    r1 = dec.parts[0].root
    if any(v not in phi for v in r1):
        L1 = dec.parts[0].layering
        r_vec = tuple(sorted(r1, key=L1.rank))
        e1 = _first_extensible(H, params.theta)
        f_vec = tuple(sorted(e1)[:k - 1])
        clash = [w for w in f_vec if w in used]
        if clash:
            raise EmbedError(f"root image {f_vec} collides with the cover at "
                             f"{clash}", stage="almost")
        phi.update(zip(r_vec, f_vec))
        used.update(f_vec)
    phi = _chain_parts(H, dec, Rv.members, W_parts, params, phi, used, deadline)
    err = validate_embedding(H, T0, phi)
    if err is not None:
        raise EmbedError(f"almost-spanning map invalid: {err}", stage="almost")
    stages["almost"] = {"time_ms": round(_now_ms() - t0, 2)}

    # absorb with the selected family
    t0 = _now_ms()
    emb = absorb_complete(H, T, T0, phi, B.X, A_used)
    stages["absorb"] = {"time_ms": round(_now_ms() - t0, 2), "swaps": m}
    err = validate_embedding(H, T, emb.phi)
    if err is not None:
        raise EmbedError(f"absorbed map invalid: {err}", stage="absorb")
    report["validated"] = True
    return emb

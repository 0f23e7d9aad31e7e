"""Partite cleaning and greedy crown extension.

Host-side tools for the embedding stage: peel a k-partite block down to a
subgraph where every surviving shadow tuple has large codegree, and extend a
partial embedding layer by layer into the cleaned block under the mod-k
layer-to-part rule.
"""

from __future__ import annotations

from itertools import combinations

from .._bitset import bits, mask_of
from ..errors import EmbedError
from ..hypergraph import Hypergraph
from ..ktree import KTree, Layering, reorder_by_layering
from .embedding import Embedding

__all__ = ["clean_partite", "extend_greedy"]


def clean_partite(H: Hypergraph, parts, d: float) -> Hypergraph:
    """Largest subgraph of the partite restriction H[W_1, ..., W_k] in which
    every shadow tuple has codegree >= d*m/k, where m is the largest part.

    Edges through a low-codegree (k-1)-set are deleted until none remain.
    The fixed point is closed under union, hence canonical regardless of
    deletion order.  Raises EmbedError when nothing survives.
    """
    k = H.k
    parts = [tuple(sorted(W)) for W in parts]
    if len(parts) != k:
        raise ValueError(f"expected {k} parts, got {len(parts)}")
    pid = {}
    for i, W in enumerate(parts):
        for v in W:
            if v in pid:
                raise ValueError(f"parts overlap at vertex {v}")
            pid[v] = i
    m = max((len(W) for W in parts), default=0)
    floor = d * m / k

    live = set()
    for e in H.edges:
        ids = [pid.get(v, -1) for v in e]
        if -1 not in ids and len(set(ids)) == k:
            live.add(e)

    through: dict = {}
    count: dict = {}
    for e in live:
        for g in combinations(e, k - 1):
            through.setdefault(g, []).append(e)
            count[g] = count.get(g, 0) + 1

    bad = sorted(g for g, c in count.items() if c < floor)
    while bad:
        g = bad.pop()
        if not 0 < count[g] < floor:
            continue
        for e in through[g]:
            if e not in live:
                continue
            live.discard(e)
            for g2 in combinations(e, k - 1):
                count[g2] -= 1
                if 0 < count[g2] < floor:
                    bad.append(g2)

    if not live:
        raise EmbedError(
            f"cleaning removed every partite edge (codegree floor {floor:.2f})",
            stage="clean",
        )
    return Hypergraph(k, H.n, sorted(live))


def extend_greedy(Hp: Hypergraph, parts, T: KTree, L: Layering, ell_cut: int,
                  phi_partial, host: Hypergraph | None = None) -> Embedding:
    """Extend an embedding of the first ell_cut + k - 1 layers to all of T.

    Layer ell_cut + i goes into parts[(i - 1) % k]; each new vertex takes the
    lex-least unused vertex of Hp adjacent to its anchor image.  phi_partial
    must cover every layer up to ell_cut and nothing above ell_cut + k - 1;
    boundary-layer vertices it misses are placed by the same rule.  The
    returned Embedding is bound to ``host`` when given (useful when the
    partial part was embedded outside Hp).
    """
    k = T.k
    if len(parts) != k:
        raise ValueError(f"expected {k} parts, got {len(parts)}")
    phi = dict(phi_partial)
    used = set(phi.values())
    if len(used) != len(phi):
        raise ValueError("phi_partial is not injective")

    head = min(ell_cut + k - 1, L.depth)
    core = set()
    for i in range(min(ell_cut, L.depth)):
        core.update(L.layers[i])
    dom = set(phi)
    if not core <= dom:
        raise ValueError(
            f"phi_partial must cover layers 1..{ell_cut}; "
            f"missing {sorted(core - dom)[:4]}"
        )
    allowed = set(core)
    for i in range(min(ell_cut, L.depth), head):
        allowed.update(L.layers[i])
    if not dom <= allowed:
        raise ValueError(
            f"phi_partial reaches past layer {head}: {sorted(dom - allowed)[:4]}"
        )

    part_masks = [mask_of(W) for W in parts]
    # The hypothesis places layer ell_cut + i inside parts[i - 1] for
    # i < k; verify it so a misrotated sigma fails loudly here.
    for i in range(1, k):
        rank = ell_cut + i
        if rank > L.depth:
            break
        for v in L.layers[rank - 1]:
            if v in phi and not (1 << phi[v]) & part_masks[(i - 1) % k]:
                raise ValueError(
                    f"phi_partial sends vertex {v} (layer {rank}) outside "
                    f"part {(i - 1) % k + 1}"
                )

    part_vertices = set()
    for W in parts:
        part_vertices.update(W)
    used_mask = mask_of(used)
    # Walk the tree in layering order so every anchor is already placed;
    # the stored order of T may root elsewhere.
    Tw = reorder_by_layering(T, L)
    base = tuple(Tw.vertex_order[:k])
    for v in Tw.vertex_order:
        if v in phi:
            continue
        i = L.rank(v) - ell_cut
        if i < 1:
            raise ValueError(f"vertex {v} below layer {ell_cut + 1} is unembedded")
        anc = Tw.anchors.get(v)
        if anc is None:
            anc = tuple(u for u in base if u != v)
        img = tuple(phi[u] for u in anc)
        # Anchors straddling the boundary have one foot outside the parts, so
        # their completions live in the ambient host, not the cleaned block.
        graph = Hp if all(u in part_vertices for u in img) else (host or Hp)
        cand = graph.nbr_mask(img) & part_masks[(i - 1) % k] & ~used_mask
        if not cand:
            raise EmbedError(
                f"frontier {tuple(sorted(img))} has no unused neighbour in "
                f"part {(i - 1) % k + 1} for vertex {v} (layer {L.rank(v)})",
                stage="extend",
            )
        w = next(bits(cand))
        phi[v] = w
        used_mask |= 1 << w
    return Embedding(T, host if host is not None else Hp, phi)

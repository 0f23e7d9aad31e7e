"""Swap walks and the connecting search.

A swap walk reverses the orientation of an ordered edge in place: one helper
vertex per transposition lets the walk revisit the edge with two positions
exchanged.  The connecting search joins two ordered shadow tuples by a walk
of prescribed length: a greedy tight path grown backwards from the far end, a
bridge vertex, a ladder onto a fresh edge, and a full swap of that edge, glued
so the total edge count is exact.

All choices are explored lex-least-first with backtracking, so results are
deterministic for fixed inputs; no randomness is involved.
"""

from __future__ import annotations

from .._bitset import bits, mask_of
from ..hypergraph import Hypergraph, Walk, walk_inspect
from .params import min_ell

__all__ = ["swap1_seq", "swap_full_seq", "build_swap_walk", "connect", "swap_length"]


def swap_length(k: int) -> int:
    """Edge count of the full swap walk (k // 2 single swaps glued)."""
    return 2 * k * (k // 2) + 1


def swap1_seq(a, j: int, u) -> list:
    """Vertex sequence of the single swap exchanging positions j and k-j+1.

    ``a`` is an ordered edge, j is 1-based with 2j <= k, and u is the helper.
    The sequence starts with a and ends with a after the transposition; it
    has 3k positions (2k+1 windows).
    """
    a = list(a)
    k = len(a)
    if not (1 <= j <= k // 2):
        raise ValueError(f"swap index j={j} out of range for k={k}")
    mid = list(a)
    mid[j - 1] = u
    mid[k - j] = a[j - 1]
    out = list(a)
    out[j - 1] = a[k - j]
    out[k - j] = a[j - 1]
    return a + mid + out


def swap_full_seq(a, helpers) -> list:
    """Vertex sequence reversing the ordered edge ``a`` via successive
    single swaps, one helper per swap, consecutive pieces glued on their
    shared k-window."""
    a = list(a)
    k = len(a)
    half = k // 2
    if len(helpers) != half:
        raise ValueError(f"need {half} helpers, got {len(helpers)}")
    seq = list(a)
    cur = list(a)
    for j in range(1, half + 1):
        piece = swap1_seq(cur, j, helpers[j - 1])
        seq.extend(piece[k:])
        cur = piece[-k:]
    return seq


def _helper_masks(H: Hypergraph, a) -> list:
    """Joint neighbourhood masks for each swap helper, in the original a."""
    k = len(a)
    out = []
    for j in range(1, k // 2 + 1):
        m1 = H.nbr_mask(a[: j - 1] + a[j:])
        m2 = H.nbr_mask(a[: k - j] + a[k - j + 1 :])
        out.append(m1 & m2)
    return out


def build_swap_walk(H: Hypergraph, a, helpers=None, within=None) -> Walk:
    """Walk from (a_1, ..., a_k) to its reversal, via one helper per swap.

    If ``helpers`` is None the lex-least admissible helper is chosen for each
    swap, drawn from ``within`` when given.  Helper j must complete both
    a minus its j-th and a minus its (k-j+1)-th entry to edges; violations
    raise ValueError.
    """
    a = tuple(a)
    k = H.k
    if len(a) != k or len(set(a)) != k:
        raise ValueError(f"{a!r} is not an ordered {k}-tuple of distinct vertices")
    if not H.has_edge(a):
        raise ValueError(f"{tuple(sorted(a))!r} is not an edge")
    half = k // 2
    masks = _helper_masks(H, a)
    amask = mask_of(a)
    if helpers is None:
        wm = mask_of(within) if within is not None else (1 << H.n) - 1
        chosen = []
        for j, m in enumerate(masks, start=1):
            m &= wm & ~amask
            if m == 0:
                raise ValueError(f"no admissible helper for swap {j}")
            chosen.append(next(bits(m)))
        helpers = chosen
    else:
        helpers = list(helpers)
        if len(helpers) != half:
            raise ValueError(f"need {half} helpers, got {len(helpers)}")
        for j, (u, m) in enumerate(zip(helpers, masks), start=1):
            if u in a:
                raise ValueError(f"helper {u} for swap {j} lies in the edge")
            if not (m >> u) & 1:
                raise ValueError(
                    f"helper {u} fails the neighbourhood conditions for swap {j}"
                )
    return walk_inspect(H, swap_full_seq(a, helpers))


def connect(H: Hypergraph, f, fp, ell: int, U, avoid=(), cap: int = 1,
            node_budget: int = 200000) -> list:
    """Up to ``cap`` walks from tuple f to tuple fp of length exactly ``ell``.

    Interior vertices are drawn from U minus avoid, f and fp.  The walk is
    assembled as f | bridge+ladder edge | full swap of that edge | reverse
    greedy path into fp; the greedy path absorbs the length difference so
    every returned walk has edge count ell.  Deterministic: all stages try
    candidates ascending and backtrack across stage boundaries.

    Returns a list (possibly empty if the search space or node budget is
    exhausted).  Raises ValueError when ell is below the admissible minimum
    or f/fp are not in the shadow.
    """
    k = H.k
    f = tuple(f)
    fp = tuple(fp)
    lo = min_ell(k)
    if ell < lo:
        raise ValueError(f"ell = {ell} below the minimum {lo} for k = {k}")
    for name, t in (("f", f), ("fp", fp)):
        if len(t) != k - 1 or len(set(t)) != k - 1:
            raise ValueError(f"{name} = {t!r} is not a ({k - 1})-tuple")
        if H.nbr_mask(t) == 0:
            raise ValueError(f"{name} = {t!r} is not in the shadow")
    if cap < 1:
        return []

    half = k // 2
    p = ell - 2 * k * half - 2 * k + 1
    pool = mask_of(U) & ~mask_of(f) & ~mask_of(fp)
    if avoid:
        pool &= ~mask_of(avoid)

    found: list = []
    budget = [node_budget]

    rev_base = tuple(reversed(fp))

    def finish(ws: list, a: list, us: list) -> Walk:
        rev_path = list(rev_base) + ws
        seq = list(f) + swap_full_seq(a, us) + list(reversed(rev_path))
        return walk_inspect(H, seq)

    def stage_helpers(ws: list, a: list, used: int, masks: list, us: list) -> bool:
        if len(us) == half:
            found.append(finish(ws, a, us))
            return len(found) >= cap
        budget[0] -= 1
        if budget[0] < 0:
            return True
        m = masks[len(us)] & pool & ~used
        for u in bits(m):
            us.append(u)
            if stage_helpers(ws, a, used | (1 << u), masks, us):
                return True
            us.pop()
        return False

    def stage_ladder(ws: list, f2: tuple, a: list, used: int) -> bool:
        if len(a) == k:
            return stage_helpers(ws, a, used, _helper_masks(H, a), [])
        budget[0] -= 1
        if budget[0] < 0:
            return True
        c = len(a)
        m = H.nbr_mask(tuple(f[c:]) + tuple(a)) & H.nbr_mask(tuple(f2[c:]) + tuple(a))
        m &= pool & ~used
        for v in bits(m):
            a.append(v)
            if stage_ladder(ws, f2, a, used | (1 << v)):
                return True
            a.pop()
        return False

    def stage_path(ws: list, used: int) -> bool:
        if len(ws) == p:
            rev_path = rev_base + tuple(ws)
            f2 = rev_path[-(k - 1):]
            return stage_ladder(ws, f2, [], used)
        budget[0] -= 1
        if budget[0] < 0:
            return True
        window = (rev_base + tuple(ws))[-(k - 1):]
        m = H.nbr_mask(window) & pool & ~used
        for w in bits(m):
            ws.append(w)
            if stage_path(ws, used | (1 << w)):
                return True
            ws.pop()
        return False

    stage_path([], 0)
    return found

"""Pure-Python compute kernels.

Same call surface as the compiled module built from ``_speed.pyx``; the
package-level dispatcher picks whichever is available. Everything here works
on int bitsets as produced by :mod:`treebed._bitset`.
"""

from __future__ import annotations

from itertools import combinations

IMPL = "py"


class PureCtx:
    __slots__ = ("k", "n", "nbr", "keys", "full")

    def __init__(self, k: int, n: int, nbr_bits: dict):
        self.k = k
        self.n = n
        self.nbr = dict(nbr_bits)
        self.keys = sorted(self.nbr)
        self.full = (1 << n) - 1


def build_ctx(k: int, n: int, nbr_bits: dict):
    """nbr_bits maps each sorted (k-1)-tuple with positive degree to the
    bitset of its completions."""
    return PureCtx(k, n, nbr_bits)


def k22_count(ctx, edge, allowed_mask=None) -> int:
    """Count copies of the complete k-partite k-graph with parts of size 2
    that contain ``edge``, with all k partner vertices inside ``allowed_mask``.

    Partners are assigned position by position; each copy corresponds to
    exactly one assignment, so the count is exact.
    """
    k = ctx.k
    nbr = ctx.nbr
    e = tuple(sorted(edge))
    allowed = ctx.full if allowed_mask is None else allowed_mask
    for v in e:
        allowed &= ~(1 << v)
    if not allowed:
        return 0
    chosen = [0] * k

    def rec(j: int, used: int) -> int:
        cand = allowed & ~used
        # every cross edge whose highest partner position is j pins a
        # neighbourhood constraint on the depth-j candidate
        for s in range(1 << j):
            f = []
            for i in range(k):
                if i == j:
                    continue
                f.append(chosen[i] if (i < j and (s >> i) & 1) else e[i])
            cand &= nbr.get(tuple(sorted(f)), 0)
            if not cand:
                return 0
        if j == k - 1:
            return cand.bit_count()
        total = 0
        rest = cand
        while rest:
            low = rest & -rest
            rest ^= low
            v = low.bit_length() - 1
            chosen[j] = v
            total += rec(j + 1, used | low)
        return total

    return rec(0, 0)


def min_pair_joint_degree(ctx, allowed_mask=None, floor=None):
    """Minimum of |N(f) & N(g) & allowed| over unordered pairs of distinct
    shadow sets, returned as (value, f, g).

    With a single shadow set the plain degree is returned with f == g.
    If ``floor`` is given, returns the first witness strictly below it.
    """
    allowed = ctx.full if allowed_mask is None else allowed_mask
    items = [(f, ctx.nbr[f] & allowed) for f in ctx.keys]
    if not items:
        return (0, (), ())
    if len(items) == 1:
        f, m = items[0]
        return (m.bit_count(), f, f)
    best = None
    for i in range(len(items) - 1):
        fi, mi = items[i]
        for j in range(i + 1, len(items)):
            fj, mj = items[j]
            val = (mi & mj).bit_count()
            if best is None or val < best[0]:
                best = (val, fi, fj)
                if floor is not None and val < floor:
                    return best
                if val == 0 and floor is None:
                    return best
    return best


def reservoir_family_check(ctx, u_mask, u_size, mu, h, early_exit=True):
    """Scan families of up to ``h`` distinct shadow sets and test that the
    joint neighbourhood intersects U proportionally:

        |N(F) & U|  >=  (deg(F) / n) * |U|  -  mu * |U|

    Returns (ok, worst_slack, worst_family).
    """
    n = ctx.n
    nbr = ctx.nbr
    keys = ctx.keys
    worst = None
    ok = True
    for size in range(1, h + 1):
        for fam in combinations(keys, size):
            m = nbr[fam[0]]
            for f in fam[1:]:
                m &= nbr[f]
            deg = m.bit_count()
            inter = (m & u_mask).bit_count()
            slack = inter - (deg * u_size) / n + mu * u_size
            if worst is None or slack < worst[0]:
                worst = (slack, fam)
            if slack < 0:
                ok = False
                if early_exit:
                    return (False, worst[0], worst[1])
    if worst is None:
        return (True, 0.0, ())
    return (ok, worst[0], worst[1])

"""Reservoir sampling with verification.

A reservoir is a vertex subset whose size, joint degrees of small shadow
families and per-edge K^(k)(2) participation all stay proportional to the
whole host, up to a slack mu.  Sampling is a seeded coin per vertex; the
three properties are then verified (exactly where affordable, by sampling
otherwise) and the draw is repeated on failure.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import comb

import numpy as np

from .. import _kernels
from .._bitset import mask_of
from ..errors import EmbedError
from ..hypergraph import Hypergraph

__all__ = ["Reservoir", "sample_reservoir"]

# Probe count for the sampled fallback of the family check: enough to catch
# systematic slack violations without scanning millions of pairs in Python.
_SAMPLED_TRIALS = 1500


@dataclass(frozen=True)
class Reservoir:
    """A verified reservoir.

    ``verified`` maps property names ("size", "families", "k22") to how they
    were checked: "exact", "sampled", or "skipped".  ``worst`` holds the
    tightest (slack, witness) seen per property.
    """

    members: tuple
    gamma: float
    mu: float
    h: int
    seed: int
    attempts: int
    verified: dict
    worst: dict

    @property
    def mask(self) -> int:
        return mask_of(self.members)

    @property
    def size(self) -> int:
        return len(self.members)

    def __contains__(self, v: int) -> bool:
        return v in set(self.members)


def _check_size(H, members, gamma, mu):
    lo = (gamma - mu) * H.n
    hi = (gamma + mu) * H.n
    ok = lo <= len(members) <= hi
    slack = min(len(members) - lo, hi - len(members))
    return ok, (slack, len(members))


def _check_families(H, umask, usize, mu, h, budget, rng):
    """Joint-degree preservation over families of at most h shadow sets.

    Exhaustive via the kernel when the family count fits the budget, else a
    seeded sample of ``budget`` families.  Returns (ok, mode, (slack, fam)).
    """
    keys = H.shadow()
    total = sum(comb(len(keys), s) for s in range(1, h + 1))
    if total <= budget:
        ctx = H._kernel_ctx()
        ok, slack, fam = _kernels.reservoir_family_check(ctx, umask, usize, mu, h)
        return ok, "exact", (slack, fam)
    worst = (None, None)
    ok = True
    for i in range(min(budget, _SAMPLED_TRIALS)):
        s = 1 + i % h
        fam = [keys[j] for j in sorted(rng.sample(range(len(keys)), s))]
        inter = H.joint_degree(fam, within=umask)
        deg = H.joint_degree(fam)
        slack = inter - deg * usize / H.n + mu * usize
        if worst[0] is None or slack < worst[0]:
            worst = (slack, tuple(fam))
        if slack < 0:
            ok = False
            break
    return ok, "sampled", worst


def _check_k22(H, umask, usize, mu, budget, full_counts):
    """Per-edge K^(k)(2) participation inside U, exact per edge.

    Skipped (reported as such) when the edge count exceeds the budget.
    """
    k, n = H.k, H.n
    if len(H.edges) > budget:
        return True, "skipped", (None, None)
    denom = comb(n - k, k)
    scale = comb(max(usize - k, 0), k)
    worst = (None, None)
    ok = True
    for e in H.edges:
        if full_counts[e] == 0:
            continue
        inside = H.k22_count(e, within=umask)
        slack = inside - (full_counts[e] / denom - mu) * scale
        if worst[0] is None or slack < worst[0]:
            worst = (slack, e)
        if slack < 0:
            ok = False
            break
    return ok, "exact", worst


def sample_reservoir(H: Hypergraph, gamma: float, mu: float, h: int, seed: int = 0,
                     check_budget: int = 200000, retry_cap: int = 8,
                     require=("size", "families", "k22")) -> Reservoir:
    """Draw and verify a (gamma, mu, h)-reservoir.

    Each vertex joins independently with probability gamma (one coin stream
    per attempt, derived from ``seed``).  Properties listed in ``require``
    must verify; the draw is repeated up to ``retry_cap`` extra times, after
    which EmbedError reports the last failure.
    """
    if not (0 < gamma <= 1):
        raise ValueError(f"gamma must be in (0, 1], got {gamma}")
    if not (0 <= mu < gamma):
        raise ValueError(f"need 0 <= mu < gamma, got mu={mu}, gamma={gamma}")
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    require = tuple(require)
    n = H.n

    full_counts = None
    if "k22" in require and len(H.edges) <= check_budget:
        full_counts = {e: H.k22_count(e) for e in H.edges}

    master = random.Random(seed)
    last_fail = None
    for attempt in range(1 + retry_cap):
        sub = master.getrandbits(64)
        if gamma == 1.0:
            members = tuple(range(n))
        else:
            coins = np.random.default_rng(sub).random(n)
            members = tuple(int(v) for v in range(n) if coins[v] < gamma)
        umask = mask_of(members)
        usize = len(members)
        verified: dict = {}
        worst: dict = {}

        ok, w = _check_size(H, members, gamma, mu)
        verified["size"], worst["size"] = "exact", w
        if not ok and "size" in require:
            last_fail = ("size", w)
            continue

        if "families" in require:
            rng = random.Random(sub ^ 0x5EED)
            ok, mode, w = _check_families(H, umask, usize, mu, h, check_budget, rng)
            verified["families"], worst["families"] = mode, w
            if not ok:
                last_fail = ("families", w)
                continue

        if "k22" in require:
            if full_counts is None:
                verified["k22"], worst["k22"] = "skipped", (None, None)
            else:
                ok, mode, w = _check_k22(H, umask, usize, mu, check_budget, full_counts)
                verified["k22"], worst["k22"] = mode, w
                if not ok:
                    last_fail = ("k22", w)
                    continue

        return Reservoir(members, gamma, mu, h, seed, attempt + 1, verified, worst)

    prop, w = last_fail if last_fail else ("size", (None, None))
    raise EmbedError(
        f"reservoir verification failed after {1 + retry_cap} draws: "
        f"property {prop!r}, worst slack {w[0]}, witness {w[1]!r}",
        stage="reservoir",
    )

"""Density certification for host hypergraphs.

Three notions are supported, each checked either exhaustively (with a hard
budget on the number of witnesses) or by seeded random sampling:

* Typical(rho, h, eps): every family F of at most h distinct (k-1)-sets has
  joint degree at least (rho^|F| - eps) * n.
* UniformlyDense(eps, d, parts): every vertex set S with |S| >= eps*n spans
  at least d * C(|S|, k) - eps * |S|^k edges. When ``parts`` is given, the
  witnesses are equal-fraction slices taken across the parts.
* WeaklyQuasirandom(eta, delta): every S with |S| >= eta*n satisfies
  |e(S) - dens * C(|S|, k)| <= delta * |S|^k, where dens is the overall
  edge density m / C(n, k).

The report records the worst slack seen (negative = violated) and the
witness achieving it, so a failed certification is reproducible.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from .hypergraph import Hypergraph

__all__ = [
    "Typical",
    "UniformlyDense",
    "WeaklyQuasirandom",
    "Exhaustive",
    "Sampled",
    "DensityReport",
    "density_check",
]


@dataclass(frozen=True)
class Typical:
    rho: float
    h: int
    eps: float


@dataclass(frozen=True)
class UniformlyDense:
    eps: float
    d: float
    parts: Optional[tuple] = None


@dataclass(frozen=True)
class WeaklyQuasirandom:
    eta: float
    delta: float


@dataclass(frozen=True)
class Exhaustive:
    budget: int = 200000


@dataclass(frozen=True)
class Sampled:
    trials: int
    seed: int = 0


@dataclass(frozen=True)
class DensityReport:
    kind: object
    mode: object
    passed: bool
    witnesses_checked: int
    worst_slack: float
    worst_witness: object


class _Worst:
    def __init__(self):
        self.slack = math.inf
        self.witness = None
        self.count = 0

    def feed(self, slack, witness):
        self.count += 1
        if slack < self.slack:
            self.slack = slack
            self.witness = witness


def _typical_slack(H, family, kind):
    thr = (kind.rho ** len(family) - kind.eps) * H.n
    return H.joint_degree(list(family)) - thr


def _ud_slack(H, S, kind):
    s = len(S)
    thr = kind.d * math.comb(s, H.k) - kind.eps * s**H.k
    return H.edge_count_inside(S) - thr


def _wq_slack(H, S, kind):
    s = len(S)
    dens = len(H) / math.comb(H.n, H.k)
    return kind.delta * s**H.k - abs(H.edge_count_inside(S) - dens * math.comb(s, H.k))


def density_check(H: Hypergraph, kind, mode) -> DensityReport:
    """Certify H against a density notion; see the module docstring.

    Exhaustive mode raises ValueError when the witness count exceeds the
    budget. Sampling is one-sided: a pass means no violation was found among
    the sampled witnesses.
    """
    worst = _Worst()
    if isinstance(kind, Typical):
        _check_typical(H, kind, mode, worst)
    elif isinstance(kind, UniformlyDense):
        _check_sets(H, kind, mode, worst, _ud_slack, kind.eps, kind.parts)
    elif isinstance(kind, WeaklyQuasirandom):
        _check_sets(H, kind, mode, worst, _wq_slack, kind.eta, None)
    else:
        raise TypeError(f"unknown density kind {kind!r}")
    return DensityReport(
        kind=kind,
        mode=mode,
        passed=worst.slack >= 0,
        witnesses_checked=worst.count,
        worst_slack=worst.slack,
        worst_witness=worst.witness,
    )


def _check_typical(H, kind, mode, worst):
    shadow_size = math.comb(H.n, H.k - 1)
    if isinstance(mode, Exhaustive):
        total = sum(math.comb(shadow_size, s) for s in range(1, kind.h + 1))
        if total > mode.budget:
            raise ValueError(
                f"{total} families exceed the exhaustive budget {mode.budget}; "
                "use Sampled mode"
            )
        all_tuples = list(combinations(range(H.n), H.k - 1))
        for size in range(1, kind.h + 1):
            for fam in combinations(all_tuples, size):
                worst.feed(_typical_slack(H, fam, kind), fam)
    elif isinstance(mode, Sampled):
        rng = random.Random(mode.seed)
        verts = range(H.n)
        for i in range(mode.trials):
            size = 1 + i % kind.h
            fam = set()
            while len(fam) < size:
                fam.add(tuple(sorted(rng.sample(verts, H.k - 1))))
            fam = tuple(sorted(fam))
            worst.feed(_typical_slack(H, fam, kind), fam)
    else:
        raise TypeError(f"unknown mode {mode!r}")


def _sample_slice(rng, parts, frac):
    S = []
    for part in parts:
        take = math.ceil(frac * len(part))
        S.extend(rng.sample(list(part), take))
    return tuple(sorted(S))


def _check_sets(H, kind, mode, worst, slack_fn, min_frac, parts):
    lo = max(H.k, math.ceil(min_frac * H.n))
    if isinstance(mode, Exhaustive):
        total = sum(math.comb(H.n, s) for s in range(lo, H.n + 1))
        if total > mode.budget:
            raise ValueError(
                f"{total} vertex sets exceed the exhaustive budget {mode.budget}; "
                "use Sampled mode"
            )
        for s in range(lo, H.n + 1):
            for S in combinations(range(H.n), s):
                worst.feed(slack_fn(H, S, kind), S)
    elif isinstance(mode, Sampled):
        rng = random.Random(mode.seed)
        for _ in range(mode.trials):
            if parts:
                frac = rng.uniform(min_frac, 1.0)
                S = _sample_slice(rng, parts, frac)
                if len(S) < H.k:
                    continue
            else:
                s = rng.randint(lo, H.n)
                S = tuple(sorted(rng.sample(range(H.n), s)))
            worst.feed(slack_fn(H, S, kind), S)
    else:
        raise TypeError(f"unknown mode {mode!r}")

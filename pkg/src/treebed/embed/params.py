"""Tunable constants for the embedding pipeline.

The asymptotic statements hide a hierarchy of constants that only exist "for n
large enough"; at the scales this package runs, they are knobs.  Every stage
reads its fractions and caps from a single PipelineParams value so that an
experiment is reproducible from (host, tree, params, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, replace


def min_ell(k: int) -> int:
    """Smallest admissible connection length for uniformity k."""
    return (2 * k + 1) * (k // 2) + 2 * k


_FRACTIONS = ("gamma", "mu", "theta", "beta", "alpha", "nu")


@dataclass(frozen=True)
class PipelineParams:
    """Knobs of the spanning-tree embedder.

    gamma      largeness fraction demanded of the host
    mu         reservoir slack
    theta      extensibility fraction
    ell        connection length; None means the minimum for the tree's k
    beta, d    decomposition parameters; None means pick per tree
    alpha      spare-space fraction (absorber budget)
    nu         absorber-subtree fraction
    walk_cap   walks requested per connection attempt
    retry_cap  resampling / restart attempts per stage
    timeout_ms wall-clock budget for one embedding run
    seed       master seed; stages derive their own streams from it
    """

    gamma: float = 0.2
    mu: float = 0.05
    theta: float = 0.01
    ell: int | None = None
    beta: float | None = None
    d: int | None = None
    alpha: float = 0.1
    nu: float = 0.2
    walk_cap: int = 4
    retry_cap: int = 8
    timeout_ms: int = 30000
    seed: int = 0

    def __post_init__(self):
        for name in _FRACTIONS:
            v = getattr(self, name)
            if v is None:
                continue
            if not (0 < v <= 1):
                raise ValueError(f"{name} must lie in (0, 1], got {v}")
        if self.d is not None and self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        if self.walk_cap < 1:
            raise ValueError("walk_cap must be positive")
        if self.retry_cap < 0:
            raise ValueError("retry_cap must be nonnegative")
        if self.timeout_ms <= 0:
            raise ValueError("timeout_ms must be positive")

    def ell_for(self, k: int) -> int:
        """Resolve the connection length for uniformity ``k``."""
        lo = min_ell(k)
        if self.ell is None:
            return lo
        if self.ell < lo:
            raise ValueError(f"ell = {self.ell} below the minimum {lo} for k = {k}")
        return self.ell

    def with_(self, **kw) -> "PipelineParams":
        return replace(self, **kw)

"""Embeddings (injective edge-preserving vertex maps) and their validator."""

from __future__ import annotations

from dataclasses import dataclass

from ..hypergraph import Hypergraph
from ..ktree import KTree


@dataclass(frozen=True, eq=False)
class Embedding:
    """An injective map from the vertices of ``tree`` into ``host``.

    The constructor does not validate; run :func:`validate_embedding` (or
    ``check()``) to certify edge preservation.
    """

    tree: KTree
    host: Hypergraph
    phi: dict

    def __post_init__(self):
        object.__setattr__(self, "phi", dict(self.phi))

    def __getitem__(self, v: int) -> int:
        return self.phi[v]

    def of(self, vs) -> tuple:
        """Componentwise image of a vertex sequence."""
        return tuple(self.phi[v] for v in vs)

    @property
    def image(self) -> frozenset:
        return frozenset(self.phi.values())

    def check(self) -> None:
        err = validate_embedding(self.host, self.tree, self.phi)
        if err is not None:
            raise ValueError(err)


def validate_embedding(H: Hypergraph, T: KTree, phi) -> str | None:
    """None if ``phi`` embeds T into H, else a message naming the first failure.

    Checks totality on V(T), range, injectivity, and edge preservation in
    T's stored edge order.
    """
    missing = [v for v in T.vertex_order if v not in phi]
    if missing:
        return f"vertex {missing[0]} has no image"
    seen = {}
    for v in T.vertex_order:
        u = phi[v]
        if not (0 <= u < H.n):
            return f"image {u} of vertex {v} outside the host"
        if u in seen:
            return f"vertices {seen[u]} and {v} collapse onto {u}"
        seen[u] = v
    for e in T.edges:
        img = tuple(sorted(phi[v] for v in e))
        if img not in H.edge_set:
            return f"edge {e} maps to non-edge {img}"
    return None

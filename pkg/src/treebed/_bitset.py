"""Helpers for vertex sets stored as Python int bitsets.

Bit i set means vertex i is in the set. Arbitrary-width ints give free
AND/OR/XOR and ``int.bit_count`` for cardinality, which is all the pure
kernels need.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def full_mask(n: int) -> int:
    return (1 << n) - 1

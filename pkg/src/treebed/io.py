"""Plain-text file formats for hosts, trees and embeddings.

Host file: a header line ``k n m`` followed by m edge lines, each k vertex
ids in strictly increasing order. Vertices are 0..n-1. Lines starting with
``#`` and blank lines are ignored.

Tree file: a header ``k n``, one line with the n vertex ids in a valid
insertion order (the first k are the base edge), then n-k+1 edge lines in a
valid tree order, each sorted increasingly; the first edge line must equal
the first k vertices of the order line.

Embedding file: one line ``tree_vertex host_vertex`` per mapped vertex.

All readers are strict: any malformed or inconsistent content raises
FormatError citing the offending line.
"""

from __future__ import annotations

from .errors import FormatError
from .hypergraph import Hypergraph, build_hypergraph
from .ktree import KTree, _validated

__all__ = [
    "read_host",
    "write_host",
    "read_tree",
    "write_tree",
    "read_embedding",
    "write_embedding",
]


def _payload_lines(path):
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            out.append((lineno, line))
    return out


def _ints(line, lineno, path, expect=None):
    try:
        vals = [int(tok) for tok in line.split()]
    except ValueError:
        raise FormatError(f"{path}:{lineno}: not a list of integers: {line!r}")
    if expect is not None and len(vals) != expect:
        raise FormatError(f"{path}:{lineno}: expected {expect} integers, got {len(vals)}")
    return vals


def read_host(path) -> Hypergraph:
    lines = _payload_lines(path)
    if not lines:
        raise FormatError(f"{path}: empty host file")
    lineno, header = lines[0]
    k, n, m = _ints(header, lineno, path, expect=3)
    if len(lines) - 1 != m:
        raise FormatError(f"{path}: header says {m} edges, found {len(lines) - 1}")
    edges = []
    for lineno, line in lines[1:]:
        e = _ints(line, lineno, path, expect=k)
        if any(e[i] >= e[i + 1] for i in range(k - 1)):
            raise FormatError(f"{path}:{lineno}: edge not strictly increasing: {line!r}")
        edges.append(tuple(e))
    try:
        return build_hypergraph(k, n, edges)
    except Exception as exc:
        raise FormatError(f"{path}: {exc}") from exc


def write_host(H: Hypergraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{H.k} {H.n} {len(H)}\n")
        for e in sorted(H.edges):
            fh.write(" ".join(map(str, e)) + "\n")


def read_tree(path) -> KTree:
    lines = _payload_lines(path)
    if not lines:
        raise FormatError(f"{path}: empty tree file")
    lineno, header = lines[0]
    k, n = _ints(header, lineno, path, expect=2)
    if len(lines) < 2:
        raise FormatError(f"{path}: missing vertex-order line")
    lineno, order_line = lines[1]
    order = _ints(order_line, lineno, path, expect=n)
    if len(set(order)) != n:
        raise FormatError(f"{path}:{lineno}: repeated vertex in order line")
    m = n - k + 1
    if len(lines) - 2 != m:
        raise FormatError(f"{path}: expected {m} edge lines, found {len(lines) - 2}")
    edges = []
    for lineno, line in lines[2:]:
        e = _ints(line, lineno, path, expect=k)
        if any(e[i] >= e[i + 1] for i in range(k - 1)):
            raise FormatError(f"{path}:{lineno}: edge not strictly increasing: {line!r}")
        edges.append(tuple(e))
    if set(edges[0]) != set(order[:k]):
        raise FormatError(f"{path}: first edge differs from the first {k} order entries")
    try:
        T = _validated(k, edges, base_order=order[:k])
    except Exception as exc:
        raise FormatError(f"{path}: {exc}") from exc
    if list(T.vertex_order) != order:
        raise FormatError(f"{path}: vertex-order line is not the insertion order of the edges")
    return T


def write_tree(T: KTree, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{T.k} {T.n}\n")
        fh.write(" ".join(map(str, T.vertex_order)) + "\n")
        for e in T.edges:
            fh.write(" ".join(map(str, e)) + "\n")


def read_embedding(path) -> dict:
    phi = {}
    for lineno, line in _payload_lines(path):
        a, b = _ints(line, lineno, path, expect=2)
        if a in phi:
            raise FormatError(f"{path}:{lineno}: tree vertex {a} mapped twice")
        phi[a] = b
    return phi


def write_embedding(phi: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for a in sorted(phi):
            fh.write(f"{a} {phi[a]}\n")

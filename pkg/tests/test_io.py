"""File format round-trips and strictness."""

import pytest

from treebed import (FormatError, gen_binomial, gen_random_ktree,
                     read_embedding, read_host, read_tree, write_embedding,
                     write_host, write_tree)


def test_host_roundtrip(tmp_path):
    H = gen_binomial(3, 9, 0.6, seed=2)
    p = tmp_path / "h.txt"
    write_host(H, p)
    H2 = read_host(p)
    assert (H2.k, H2.n, H2.edges) == (H.k, H.n, H.edges)


def test_tree_roundtrip(tmp_path):
    T = gen_random_ktree(3, 11, max_degree=4, seed=9)
    p = tmp_path / "t.txt"
    write_tree(T, p)
    T2 = read_tree(p)
    assert T2.vertex_order == T.vertex_order
    assert T2.edges == T.edges


def test_embedding_roundtrip(tmp_path):
    phi = {0: 3, 1: 0, 2: 7}
    p = tmp_path / "m.txt"
    write_embedding(phi, p)
    assert read_embedding(p) == phi


def test_comments_and_blanks_ignored(tmp_path):
    p = tmp_path / "h.txt"
    p.write_text("# a host\n\n3 4 1\n# the only edge\n0 1 2\n")
    H = read_host(p)
    assert H.edges == ((0, 1, 2),)


@pytest.mark.parametrize("content", [
    "3 4\n0 1 2\n",            # bad header arity
    "3 4 2\n0 1 2\n",          # missing edge line
    "3 4 1\n0 2 1\n",          # not strictly increasing
    "3 4 1\n0 1 2 3\n",        # wrong edge arity
    "x 4 1\n0 1 2\n",          # non-integer
])
def test_host_reader_rejects(tmp_path, content):
    p = tmp_path / "bad.txt"
    p.write_text(content)
    with pytest.raises(FormatError):
        read_host(p)


def test_tree_reader_rejects_wrong_first_edge(tmp_path):
    p = tmp_path / "bad_t.txt"
    # order says base is 0 1 2 but first edge line differs
    p.write_text("3 4\n0 1 2 3\n0 1 3\n1 2 3\n")
    with pytest.raises(FormatError):
        read_tree(p)


def test_embedding_reader_rejects_duplicates(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("0 1\n0 2\n")
    with pytest.raises(FormatError):
        read_embedding(p)

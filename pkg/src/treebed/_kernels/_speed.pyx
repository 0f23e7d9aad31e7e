# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled compute kernels.

Mirrors the call surface of ``_pure`` exactly, including iteration order and
tie-breaking, so the two implementations are interchangeable. Bitsets cross
the boundary as Python ints and are unpacked into little-endian uint64 rows;
the inner loops (row AND, popcount, pair scans) run as plain C.
"""

from itertools import combinations

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil

IMPL = "cy"


class CyCtx:
    __slots__ = ("k", "n", "words", "keys", "key_index", "rows", "degs",
                 "full_row", "pair_index")

    def __init__(self, k, n, nbr_bits):
        self.k = k
        self.n = n
        words = (n + 63) // 64
        self.words = words
        self.keys = sorted(nbr_bits)
        self.key_index = {f: i for i, f in enumerate(self.keys)}
        rows = np.zeros((max(len(self.keys), 1), words), dtype=np.uint64)
        degs = np.zeros(max(len(self.keys), 1), dtype=np.int64)
        for i, f in enumerate(self.keys):
            m = int(nbr_bits[f])
            rows[i] = np.frombuffer(m.to_bytes(words * 8, "little"), dtype="<u8")
            degs[i] = m.bit_count()
        self.rows = rows
        self.degs = degs
        self.full_row = _int_to_row((1 << n) - 1, words)
        if k == 3:
            # Shadow sets are pairs; a dense symmetric lookup table lets the
            # K22 counter stay in C instead of hashing tuples per node.
            pi = np.full((n, n), -1, dtype=np.int32)
            for (a, b), i in self.key_index.items():
                pi[a, b] = i
                pi[b, a] = i
            self.pair_index = pi
        else:
            self.pair_index = None


def build_ctx(k, n, nbr_bits):
    """nbr_bits maps each sorted (k-1)-tuple with positive degree to the
    bitset of its completions."""
    return CyCtx(k, n, nbr_bits)


def _int_to_row(m, words):
    return np.frombuffer(int(m).to_bytes(words * 8, "little"), dtype="<u8").copy()


cdef long _popcount_row(cnp.uint64_t[::1] r, int words) nogil:
    cdef long total = 0
    cdef int w
    for w in range(words):
        total += __builtin_popcountll(r[w])
    return total


cdef bint _and_into(cnp.uint64_t[::1] dst, cnp.uint64_t[::1] src, int words) nogil:
    """dst &= src; returns True when dst is still nonzero."""
    cdef bint any_bit = False
    cdef int w
    for w in range(words):
        dst[w] &= src[w]
        if dst[w]:
            any_bit = True
    return any_bit


def _k22_rec(int j, int k, int words, tuple e, list chosen, dict key_index,
             cnp.uint64_t[:, ::1] rows, cnp.uint64_t[::1] allowed,
             cnp.uint64_t[::1] used, cnp.uint64_t[:, ::1] buf):
    cdef int w, s, i, idx
    cdef unsigned long long word, low
    cdef long total = 0
    cdef cnp.uint64_t[::1] cand = buf[j]
    for w in range(words):
        cand[w] = allowed[w] & ~used[w]
    for s in range(1 << j):
        f = []
        for i in range(k):
            if i == j:
                continue
            f.append(chosen[i] if (i < j and (s >> i) & 1) else e[i])
        idx = key_index.get(tuple(sorted(f)), -1)
        if idx < 0:
            return 0
        if not _and_into(cand, rows[idx], words):
            return 0
    if j == k - 1:
        return _popcount_row(cand, words)
    snapshot = np.array(buf[j])
    cdef cnp.uint64_t[::1] snap = snapshot
    for w in range(words):
        word = snap[w]
        while word:
            low = word & (0 - word)
            word ^= low
            chosen[j] = (w << 6) + __builtin_ctzll(low)
            used[w] |= low
            total += _k22_rec(j + 1, k, words, e, chosen, key_index, rows,
                              allowed, used, buf)
            used[w] &= ~low
    return total


cdef long _k22_k3(cnp.int32_t[:, ::1] pidx, cnp.uint64_t[:, ::1] rows,
                  cnp.uint64_t[::1] allowed, int words,
                  int e0, int e1, int e2,
                  cnp.uint64_t[::1] c1, cnp.uint64_t[::1] c2) nogil:
    """k == 3 specialisation of the partner assignment: same candidate
    filters as the recursion, unrolled into a triple loop."""
    cdef long total = 0
    cdef int w, w0, w1, v0, v1
    cdef int r01, r02, r12, rv0e1, rv0e2, re0v1, rv0v1
    cdef unsigned long long word0, low0, word1, low1
    r01 = pidx[e0, e1]
    r02 = pidx[e0, e2]
    r12 = pidx[e1, e2]
    if r01 < 0 or r02 < 0 or r12 < 0:
        return 0
    for w0 in range(words):
        word0 = allowed[w0] & rows[r12, w0]
        while word0:
            low0 = word0 & (0 - word0)
            word0 ^= low0
            v0 = (w0 << 6) + __builtin_ctzll(low0)
            rv0e1 = pidx[v0, e1]
            if rv0e1 < 0:
                continue
            rv0e2 = pidx[v0, e2]
            if rv0e2 < 0:
                continue
            for w in range(words):
                c1[w] = allowed[w] & rows[r02, w] & rows[rv0e2, w]
            c1[w0] &= ~low0
            for w1 in range(words):
                word1 = c1[w1]
                while word1:
                    low1 = word1 & (0 - word1)
                    word1 ^= low1
                    v1 = (w1 << 6) + __builtin_ctzll(low1)
                    re0v1 = pidx[e0, v1]
                    if re0v1 < 0:
                        continue
                    rv0v1 = pidx[v0, v1]
                    if rv0v1 < 0:
                        continue
                    for w in range(words):
                        c2[w] = (allowed[w] & rows[r01, w] & rows[rv0e1, w]
                                 & rows[re0v1, w] & rows[rv0v1, w])
                    c2[w0] &= ~low0
                    c2[w1] &= ~low1
                    total += _popcount_row(c2, words)
    return total


def k22_count(ctx, edge, allowed_mask=None):
    """Count copies of the complete k-partite k-graph with parts of size 2
    that contain ``edge``, with all k partner vertices inside ``allowed_mask``.

    Partners are assigned position by position; each copy corresponds to
    exactly one assignment, so the count is exact.
    """
    cdef int k = ctx.k
    cdef int words = ctx.words
    e = tuple(sorted(edge))

    allowed_arr = (
        np.array(ctx.full_row) if allowed_mask is None else _int_to_row(allowed_mask, words)
    )
    for v in e:
        allowed_arr[v >> 6] &= ~(np.uint64(1) << np.uint64(v & 63))
    if not allowed_arr.any():
        return 0
    buf = np.empty((k, words), dtype=np.uint64)
    if k == 3:
        return int(
            _k22_k3(ctx.pair_index, ctx.rows, allowed_arr, words,
                    e[0], e[1], e[2], buf[0], buf[1])
        )
    used = np.zeros(words, dtype=np.uint64)
    chosen = [0] * k
    return int(
        _k22_rec(0, k, words, e, chosen, ctx.key_index, ctx.rows, allowed_arr, used, buf)
    )


def min_pair_joint_degree(ctx, allowed_mask=None, floor=None):
    """Minimum of |N(f) & N(g) & allowed| over unordered pairs of distinct
    shadow sets, returned as (value, f, g).

    With a single shadow set the plain degree is returned with f == g.
    If ``floor`` is given, returns the first witness strictly below it.
    """
    cdef int words = ctx.words
    keys = ctx.keys
    cdef int nk = len(keys)
    if nk == 0:
        return (0, (), ())
    if allowed_mask is None:
        masked = np.array(ctx.rows[:nk])
    else:
        masked = ctx.rows[:nk] & _int_to_row(allowed_mask, words)[None, :]
    cdef cnp.uint64_t[:, ::1] rm = masked
    if nk == 1:
        return (int(_popcount_row(rm[0], words)), keys[0], keys[0])

    cdef double flr = -1.0
    cdef bint has_floor = floor is not None
    if has_floor:
        flr = float(floor)
    cdef long best = -1
    cdef int bi = 0, bj = 0, i, j, w
    cdef long val
    for i in range(nk - 1):
        for j in range(i + 1, nk):
            val = 0
            for w in range(words):
                val += __builtin_popcountll(rm[i, w] & rm[j, w])
            if best < 0 or val < best:
                best = val
                bi = i
                bj = j
                if has_floor and val < flr:
                    return (int(best), keys[bi], keys[bj])
                if val == 0 and not has_floor:
                    return (int(best), keys[bi], keys[bj])
    return (int(best), keys[bi], keys[bj])


def reservoir_family_check(ctx, u_mask, u_size, mu, h, early_exit=True):
    """Scan families of up to ``h`` distinct shadow sets and test that the
    joint neighbourhood intersects U proportionally:

        |N(F) & U|  >=  (deg(F) / n) * |U|  -  mu * |U|

    Returns (ok, worst_slack, worst_family).
    """
    cdef int words = ctx.words
    cdef int n = ctx.n
    keys = ctx.keys
    cdef int nk = len(keys)
    cdef cnp.uint64_t[:, ::1] rows = ctx.rows
    u_arr = _int_to_row(u_mask, words)
    cdef cnp.uint64_t[::1] urow = u_arr
    cdef double usz = float(u_size)
    cdef double bonus = float(mu) * usz
    cdef double worst = 0.0
    cdef bint have_worst = False
    cdef bint ok = True
    cdef bint stop = early_exit
    worst_fam = ()
    cdef int i, j, w
    cdef long deg, inter
    cdef double slack

    if nk == 0:
        return (True, 0.0, ())

    for size in range(1, h + 1):
        if size == 1:
            for i in range(nk):
                deg = 0
                inter = 0
                for w in range(words):
                    deg += __builtin_popcountll(rows[i, w])
                    inter += __builtin_popcountll(rows[i, w] & urow[w])
                slack = inter - (deg * usz) / n + bonus
                if not have_worst or slack < worst:
                    worst = slack
                    worst_fam = (keys[i],)
                    have_worst = True
                if slack < 0:
                    ok = False
                    if stop:
                        return (False, worst, worst_fam)
        elif size == 2:
            for i in range(nk - 1):
                for j in range(i + 1, nk):
                    deg = 0
                    inter = 0
                    for w in range(words):
                        deg += __builtin_popcountll(rows[i, w] & rows[j, w])
                        inter += __builtin_popcountll(rows[i, w] & rows[j, w] & urow[w])
                    slack = inter - (deg * usz) / n + bonus
                    if not have_worst or slack < worst:
                        worst = slack
                        worst_fam = (keys[i], keys[j])
                        have_worst = True
                    if slack < 0:
                        ok = False
                        if stop:
                            return (False, worst, worst_fam)
        else:
            for fam in combinations(range(nk), size):
                joint = np.array(ctx.rows[fam[0]])
                for idx in fam[1:]:
                    joint &= ctx.rows[idx]
                deg = _popcount_row(joint, words)
                inter = _popcount_row(joint & u_arr, words)
                slack = inter - (deg * usz) / n + bonus
                famkeys = tuple(keys[idx] for idx in fam)
                if not have_worst or slack < worst:
                    worst = slack
                    worst_fam = famkeys
                    have_worst = True
                if slack < 0:
                    ok = False
                    if stop:
                        return (False, worst, worst_fam)
    if not have_worst:
        return (True, 0.0, ())
    return (ok, worst, worst_fam)

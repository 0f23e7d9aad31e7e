#!/usr/bin/env python3
"""Compare the pure-Python and compiled kernels on a binomial host.

Usage: python benchmarks/bench_kernels.py [n] [p]
"""

import sys
import time

from treebed._kernels import _pure

try:
    from treebed._kernels import _speed
except ImportError:
    _speed = None

from treebed.generators import gen_binomial


def bench(label, fn, repeat=3):
    best = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    print(f"  {label:<28} {best * 1000:9.2f} ms")
    return out


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 70
    p = float(sys.argv[2]) if len(sys.argv) > 2 else 0.6
    H = gen_binomial(3, n, p, seed=42)
    print(f"host: k=3 n={n} p={p} m={len(H)}")
    u_mask = 0
    for v in range(0, n, 4):
        u_mask |= 1 << v
    u_size = bin(u_mask).count("1")
    sample_edges = H.edges[:: max(1, len(H) // 50)]

    impls = [("pure", _pure)]
    if _speed is not None:
        impls.append(("cython", _speed))
    else:
        print("compiled kernels unavailable; benchmarking pure only")

    results = {}
    for name, mod in impls:
        print(f"[{name}]")
        ctx = bench("build_ctx", lambda m=mod: m.build_ctx(3, n, H._nbr))
        r1 = bench(
            f"k22_count x{len(sample_edges)}",
            lambda m=mod, c=ctx: [m.k22_count(c, e) for e in sample_edges],
        )
        r2 = bench("min_pair_joint_degree", lambda m=mod, c=ctx: m.min_pair_joint_degree(c))
        r3 = bench(
            "reservoir_check h=2",
            lambda m=mod, c=ctx: m.reservoir_family_check(c, u_mask, u_size, 0.2, 2, early_exit=False),
        )
        results[name] = (r1, r2[0], r3[0], round(r3[1], 6))

    if len(results) == 2:
        a, b = results["pure"], results["cython"]
        agree = a[0] == b[0] and a[1] == b[1] and a[2] == b[2] and abs(a[3] - b[3]) < 1e-6
        print(f"outputs agree: {agree}")
        if not agree:
            sys.exit(1)


if __name__ == "__main__":
    main()

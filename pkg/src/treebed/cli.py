"""Command-line front end.

Exit codes: 0 success, 1 negative result (validation failure, proven
absence, embedding failure), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .embed.oracle import brute_force_embed
from .embed.params import PipelineParams
from .embed.pipeline import embed_spanning
from .embed.embedding import validate_embedding
from .errors import EmbedError, TreebedError
from .experiment import ExperimentConfig, run_experiment, resolve_out_dir
from .generators import gen_binomial, gen_hab, gen_random_ktree
from .hypergraph import Hypergraph
from .io import (read_embedding, read_host, read_tree, write_embedding,
                 write_host, write_tree)
from .ktree import (build_ktree, decompose_beta_d, flatten,
                    validate_decomposition)


def _cmd_gen_host(args) -> int:
    if args.kind == "hab":
        if args.a is None or args.b is None:
            print("gen-host --kind hab needs --a and --b", file=sys.stderr)
            return 2
        n = args.a + args.b
        H = gen_hab(args.k, range(args.a), range(args.a, n))
    elif args.kind == "complete":
        if args.n is None:
            print("gen-host --kind complete needs --n", file=sys.stderr)
            return 2
        H = gen_binomial(args.k, args.n, 1.0, seed=args.seed)
    else:
        if args.n is None or args.p is None:
            print("gen-host --kind binomial needs --n and --p", file=sys.stderr)
            return 2
        H = gen_binomial(args.k, args.n, args.p, seed=args.seed)
    write_host(H, args.out)
    print(f"wrote {args.kind} host: k={H.k} n={H.n} m={len(H.edges)} "
          f"min_codegree={H.min_codegree()} -> {args.out}")
    return 0


def _cmd_gen_tree(args) -> int:
    k, n = args.k, args.n
    if args.kind == "path":
        T = build_ktree(k, n, [tuple(range(i, i + k)) for i in range(n - k + 1)])
    elif args.kind == "star":
        head = tuple(range(k - 1))
        T = build_ktree(k, n, [head + (x,) for x in range(k - 1, n)])
    else:
        T = gen_random_ktree(k, n, max_degree=args.max_degree, seed=args.seed)
    write_tree(T, args.out)
    print(f"wrote {args.kind} tree: k={k} n={n} delta1={T.delta1} -> {args.out}")
    return 0


def _cmd_embed(args) -> int:
    H = read_host(args.host)
    T = read_tree(args.tree)
    params = PipelineParams(timeout_ms=args.timeout_ms, seed=args.seed)
    report: dict = {}
    try:
        emb = embed_spanning(H, T, params, method=args.method, report=report)
    except EmbedError as ex:
        if report.get("proven_absent"):
            print(f"proven-absent: {ex}")
        else:
            print(f"failed at stage {ex.stage}: {ex}")
        if args.report:
            _dump_report(report, args.report)
        return 1
    print(f"embedded: n={T.n} method={args.method} "
          f"retries={report.get('retries', 0)}")
    if args.out_map:
        write_embedding(emb.phi, args.out_map)
        print(f"map -> {args.out_map}")
    if args.report:
        _dump_report(report, args.report)
    return 0


def _dump_report(report, path) -> None:
    from .experiment import _jsonable
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(report), fh, indent=2, sort_keys=True)


def _cmd_check(args) -> int:
    if args.what == "host":
        H = read_host(args.host)
        print(f"host ok: k={H.k} n={H.n} m={len(H.edges)} "
              f"min_codegree={H.min_codegree()}")
        return 0
    if args.what == "tree":
        T = read_tree(args.tree)
        print(f"tree ok: k={T.k} n={T.n} delta1={T.delta1}")
        return 0
    H = read_host(args.host)
    T = read_tree(args.tree)
    phi = read_embedding(args.map)
    err = validate_embedding(H, T, phi)
    if err is None:
        print("embedding ok")
        return 0
    print(f"embedding invalid: {err}")
    return 1


def _cmd_decompose(args) -> int:
    T = read_tree(args.tree)
    r = tuple(sorted(T.vertex_order[:T.k - 1]))
    L = flatten(T, r)
    dec = decompose_beta_d(T, r, L, args.beta, args.d)
    bad = validate_decomposition(T, r, L, dec)
    sizes = [len(p.tree.edges) for p in dec.parts]
    print(f"parts={len(dec.parts)} sizes={sizes} beta={args.beta} d={args.d} "
          f"bound={2 * T.delta1 ** args.d / args.beta:.1f}")
    if bad is not None:
        clause, detail = bad
        print(f"decomposition violates {clause}: {detail}")
        return 1
    return 0


def _cmd_experiment(args) -> int:
    if args.seeds:
        seeds = tuple(int(s) for s in args.seeds.split(","))
    else:
        seeds = tuple(range(args.seed, args.seed + args.trials))
    cfg = ExperimentConfig(
        host_kind=args.host_kind, k=args.k, n=args.n, p=args.p,
        a=args.a, b=args.b, max_degree=args.max_degree, method=args.method,
        params=PipelineParams(timeout_ms=args.timeout_ms),
        seeds=seeds, codegree_floor=args.codegree_floor, out_dir=args.out)
    records = run_experiment(cfg)
    good = sum(r.success for r in records)
    out = resolve_out_dir(args.out)
    print(f"{good}/{len(records)} trials succeeded; results in {out}")
    return 0


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="treebed",
                                  description="Tight k-trees in k-uniform "
                                              "hypergraphs.")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-host", help="generate a host hypergraph file")
    p.add_argument("--kind", choices=("binomial", "hab", "complete"),
                   default="binomial")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=_cmd_gen_host)

    p = sub.add_parser("gen-tree", help="generate a tight k-tree file")
    p.add_argument("--kind", choices=("random", "path", "star"),
                   default="random")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-degree", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=_cmd_gen_tree)

    p = sub.add_parser("embed", help="embed a spanning tree into a host")
    p.add_argument("--host", required=True)
    p.add_argument("--tree", required=True)
    p.add_argument("--method", choices=("hybrid", "strict", "brute"),
                   default="hybrid")
    p.add_argument("--timeout-ms", type=int, default=30000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-map")
    p.add_argument("--report")
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("check", help="validate a host, tree, or embedding")
    p.add_argument("--what", choices=("host", "tree", "embedding"),
                   required=True)
    p.add_argument("--host")
    p.add_argument("--tree")
    p.add_argument("--map")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("decompose", help="run the (beta, d)-decomposition")
    p.add_argument("--tree", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("experiment", help="run a seeded embedding sweep")
    p.add_argument("--host-kind", choices=("binomial", "hab", "complete"),
                   default="binomial")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--n", type=int, default=30)
    p.add_argument("--p", type=float, default=0.9)
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--max-degree", type=int, default=3)
    p.add_argument("--method", choices=("hybrid", "strict", "brute"),
                   default="hybrid")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", help="comma-separated explicit seed list")
    p.add_argument("--timeout-ms", type=int, default=30000)
    p.add_argument("--codegree-floor", type=float)
    p.add_argument("--out", help="output dir (default: $TREEBED_OUT or ./runs)")
    p.set_defaults(func=_cmd_experiment)

    return top


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    missing = []
    if args.command == "check":
        need = {"host": ("host",), "tree": ("tree",),
                "embedding": ("host", "tree", "map")}[args.what]
        missing = [f"--{x}" for x in need if getattr(args, x) is None]
    if missing:
        print(f"check --what {args.what} needs {' '.join(missing)}",
              file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except TreebedError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 1
    except OSError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bench as B
from .dataset import DatasetError, load
from .forster import ConvergenceFailure, DimensionTooFew, apply_certificate, forster_transform
from .inference import NodeLimitExceeded
from .ldt import (DecisionTree, InconsistentOracle, LocateConfig, SearchExhausted, SizeGuardExceeded,
                  VerificationTooLarge, bruteforce_locate, build_tree, ldt_fix, locate_deterministic,
                  locate_randomized, universal_report, universal_set, verify_universal)
from .oracle import PointOracle

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INCONSISTENT, EXIT_FORSTER, EXIT_SIZE = 0, 1, 2, 3, 4, 5


class InputError(Exception):
    pass


def fmt_signs(signs) -> str:
    return " ".join("+1" if s > 0 else "-1" if s < 0 else "0" for s in signs)


def _config(args, d: int | None = None) -> LocateConfig:
    data = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise InputError(f"cannot read config {args.config}: {e}") from None
    if getattr(args, "seed", None) is not None:
        data["seed"] = args.seed
    try:
        cfg = LocateConfig.from_dict(data)
        return cfg.validate(d) if d is not None else cfg
    except (TypeError, ValueError) as e:
        raise InputError(str(e)) from None


def _dataset(args):
    try:
        return load(args.dataset, as_csv=getattr(args, "csv", False))
    except OSError as e:
        raise InputError(f"cannot read {args.dataset}: {e.strerror}") from None


def _parse_vec(text: str, d: int):
    try:
        v = tuple(float(t) for t in text.replace(",", " ").split())
    except ValueError:
        raise InputError(f"malformed point {text!r}") from None
    if len(v) != d:
        raise InputError(f"point has {len(v)} coordinates, expected d={d}")
    return v


def _points(args, ds):
    if args.x is not None:
        return [_parse_vec(args.x, ds.d)]
    if args.point is not None:
        if not 0 <= args.point < len(ds.points):
            raise InputError(f"point index {args.point} out of range (dataset has {len(ds.points)})")
        return [ds.points[args.point]]
    if not ds.points:
        raise InputError("no point given: use --x or a dataset with points")
    return ds.points


def cmd_locate(args) -> int:
    ds = _dataset(args)
    cfg = _config(args, ds.d)
    pts = _points(args, ds)
    if args.transcript and len(pts) != 1:
        raise InputError("--transcript needs a single point (use --x or --point)")
    H = ds.H
    ok = True
    for x in pts:
        if args.deterministic:
            signs, transcript = locate_deterministic(H, PointOracle(x), cfg)
        else:
            signs, transcript, _ = locate_randomized(H, PointOracle(x), cfg)
        print(fmt_signs(signs))
        c = transcript.counters
        print(f"queries: {len(transcript)} (label {c['label']}, comparison {c['comparison']}, "
              f"generalized {c['generalized']})")
        if args.transcript:
            with open(args.transcript, "w", encoding="utf-8") as f:
                f.write(transcript.to_csv())
        if args.check and tuple(signs) != bruteforce_locate(H, x):
            ok = False
    if args.check:
        print("OK" if ok else "MISMATCH")
    return EXIT_OK if ok else EXIT_INCONSISTENT


def cmd_forster(args) -> int:
    ds = _dataset(args)
    try:
        cert = forster_transform(ds.H, args.target_c, args.max_iters)
    except ConvergenceFailure as e:
        print(f"ConvergenceFailure: best_achieved_c={e.best_achieved_c:.17g} iterations={e.iterations}",
              file=sys.stderr)
        return EXIT_FORSTER
    except DimensionTooFew as e:
        raise InputError(str(e)) from None
    print(f"achieved_c={cert.achieved_c:.17g} iterations={cert.iterations}")
    if args.matrix:
        for row in cert.transform:
            print(" ".join(format(float(v), ".17g") for v in row))
    return EXIT_OK


def cmd_build(args) -> int:
    ds = _dataset(args)
    cfg = _config(args, ds.d)
    tree = build_tree(ds.H, cfg, zero_branches=not args.almost_everywhere, max_nodes=args.max_nodes)
    tree = ldt_fix(tree)
    text = tree.to_json()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    print(f"nodes={len(tree.nodes)} leaves={tree.leaves()} depth={tree.depth()} fixed={tree.fixed}",
          file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        with open(args.tree, encoding="utf-8") as f:
            tree = DecisionTree.from_json(f.read())
    except OSError as e:
        raise InputError(f"cannot read {args.tree}: {e.strerror}") from None
    except (ValueError, KeyError, TypeError) as e:
        raise InputError(f"malformed tree: {e}") from None
    if args.dataset:
        pts = _points(args, _dataset(args))
    elif args.x is not None:
        pts = [_parse_vec(args.x, tree.d)]
    else:
        rng = np.random.default_rng(_config(args).seed)
        pts = [tuple(v) for v in rng.standard_normal((args.random, tree.d))]
    H = np.array(tree.rows)
    good = sum(tuple(tree.evaluate(x)) == bruteforce_locate(H, x) for x in pts)
    status = "OK" if good == len(pts) else "MISMATCH"
    print(f"{good}/{len(pts)} {status}")
    return EXIT_OK if good == len(pts) else EXIT_INCONSISTENT


def cmd_universal(args) -> int:
    ds = _dataset(args)
    cfg = _config(args, ds.d)
    H = ds.H
    try:
        unit = apply_certificate(forster_transform(H, cfg.target_c), H)
    except (ConvergenceFailure, DimensionTooFew):
        unit = H / np.linalg.norm(H, axis=1)[:, None]
    shortcut = not args.exhaustive
    if args.subset is not None:
        if args.subset == "all":
            S = list(range(len(H)))
        else:
            try:
                S = [int(t) for t in args.subset.replace(",", " ").split()]
            except ValueError:
                raise InputError(f"malformed subset {args.subset!r}") from None
            if any(not 0 <= i < len(H) for i in S):
                raise InputError("subset index out of range")
    else:
        S = universal_set(unit, cfg, np.random.default_rng(cfg.seed), shortcut=shortcut)
        print("S = " + " ".join(str(i) for i in S))
    if args.exhaustive:
        rep = universal_report(S, unit, cfg.verify_limit)
        print(f"cells={rep.cells} min_inferred={rep.min_inferred} required={rep.required}")
        ok = rep.certified
    else:
        ok = verify_universal(S, unit, cfg.verify_limit)
    print("certified" if ok else "not certified")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_bench(args) -> int:
    cfg = _config(args)
    seed = cfg.seed
    if args.kind == "scaling":
        rep = B.bench_query_scaling(args.dims, args.sizes, args.trials, cfg, args.dist, seed)
    elif args.kind == "inference":
        rep = B.bench_inference_rate(args.dims[0], args.sizes[0], args.trials, cfg, args.dist, seed)
    else:
        d = args.dims[0]
        k = args.k if args.k is not None else cfg.k(d)
        rep = B.bench_subsample_isotropy(d, args.sizes[0], k, args.trials, seed)
    sys.stdout.write(rep.to_table())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(rep.to_csv())
    return EXIT_OK


def _ints(text: str) -> list:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a list of integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed (default 0)")
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON file with locator settings")
    common.add_argument("--check", action="store_true", default=argparse.SUPPRESS,
                        help="cross-check results against brute force")
    common.add_argument("--transcript", default=argparse.SUPPRESS, help="write the query transcript CSV here")

    p = argparse.ArgumentParser(prog="hyperloc", parents=[common],
                                description="Point location in hyperplane arrangements with comparison queries.")
    sub = p.add_subparsers(dest="command", required=True)

    def dataset_args(sp, required=True):
        sp.add_argument("dataset", nargs=None if required else "?", help="dataset JSON (or CSV with --csv)")
        sp.add_argument("--csv", action="store_true", help="dataset is CSV, one hyperplane per row")

    def point_args(sp):
        sp.add_argument("--x", help="query point, comma or space separated")
        sp.add_argument("--point", type=int, help="index of a dataset point")

    sp = sub.add_parser("locate", parents=[common], help="compute the sign vector of a point")
    dataset_args(sp)
    point_args(sp)
    sp.add_argument("--deterministic", action="store_true", help="use the universal-set locator")
    sp.set_defaults(func=cmd_locate)

    sp = sub.add_parser("forster", parents=[common], help="compute a Forster transform")
    dataset_args(sp)
    sp.add_argument("--target-c", type=float, default=0.99)
    sp.add_argument("--max-iters", type=int, default=10_000)
    sp.add_argument("--matrix", action="store_true", help="also print the transform")
    sp.set_defaults(func=cmd_forster)

    sp = sub.add_parser("build", parents=[common], help="build and fix up a decision tree")
    dataset_args(sp)
    sp.add_argument("-o", "--output", help="write the tree here instead of stdout")
    sp.add_argument("--almost-everywhere", action="store_true",
                    help="skip 0-branches while building; the fix-up handles inputs on hyperplanes")
    sp.add_argument("--max-nodes", type=int, help="size guard (default from config)")
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("verify", parents=[common], help="evaluate a tree against brute force")
    sp.add_argument("--tree", required=True)
    dataset_args(sp, required=False)
    point_args(sp)
    sp.add_argument("--random", type=int, default=100, help="number of random points (default 100)")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("universal", parents=[common], help="find or verify a universal set")
    dataset_args(sp)
    sp.add_argument("--subset", help="verify this subset ('all' or indices) instead of searching")
    sp.add_argument("--exhaustive", action="store_true", help="enumerate every cell even when S is large")
    sp.set_defaults(func=cmd_universal)

    sp = sub.add_parser("bench", parents=[common], help="run a benchmark")
    sp.add_argument("kind", choices=("scaling", "inference", "subsample"))
    sp.add_argument("--dims", type=_ints, default=[2])
    sp.add_argument("--sizes", type=_ints, default=[64, 256])
    sp.add_argument("--trials", type=int, default=5)
    sp.add_argument("--dist", choices=B.DISTRIBUTIONS, default="sphere")
    sp.add_argument("--k", type=int, help="subsample size (subsample benchmark)")
    sp.add_argument("--out", help="write per-trial CSV here")
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name, default in (("seed", None), ("config", None), ("check", False), ("transcript", None)):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        return args.func(args)
    except (InputError, DatasetError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except InconsistentOracle as e:
        print(f"inconsistent: {e}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except (SizeGuardExceeded, NodeLimitExceeded, VerificationTooLarge, SearchExhausted) as e:
        print(f"size guard: {e}", file=sys.stderr)
        return EXIT_SIZE


if __name__ == "__main__":
    sys.exit(main())

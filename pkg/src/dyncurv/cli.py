"""Command-line driver: simulate, distances, analyze, erode, selftest."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import load_config


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="experiment JSON file")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config field, e.g. --set grid.S=24 (repeatable)")
    p.add_argument("--output-dir", help="shorthand for --set output_dir=...")
    p.add_argument("--threads", type=int, help="shorthand for --set thread_count=...")


def _config(args):
    overrides = list(args.overrides)
    if args.output_dir:
        overrides.append(f"output_dir={json.dumps(args.output_dir)}")
    if args.threads:
        overrides.append(f"thread_count={args.threads}")
    return load_config(args.config, overrides)


def _load_module(path: Path):
    from .dynmodule import ThinDynModule
    from .erosion import GridModule
    if not path.exists():
        raise FileNotFoundError(f"module file not found: {path}")
    obj = json.loads(path.read_text())
    if "grid" in obj:
        return ThinDynModule.from_json(obj)
    if "dims" in obj:
        return GridModule.from_json(obj)
    raise ValueError(f"{path}: neither a Dyn module nor a grid module")


def cmd_erode(a: Path, b: Path, validate: bool = True) -> float:
    from .dynmodule import ThinDynModule
    from .erosion import erosion_distance, erosion_distance_dyn
    A, B = _load_module(a), _load_module(b)
    if isinstance(A, ThinDynModule) and isinstance(B, ThinDynModule):
        return erosion_distance_dyn(A, B, validate=validate)
    if type(A) is not type(B):
        raise ValueError("cannot compare a Dyn module with a grid module")
    return erosion_distance(A, B, validate=validate)


def selftest(pairs_2d: int = 200, pairs_3d: int = 50, seed: int = 0) -> bool:
    """Sweep vs brute-force oracle on random convex supports, plus distance axioms."""
    from .erosion import erosion_distance, erosion_distance_oracle, random_acd_module
    rng = np.random.default_rng(seed)
    failures = 0
    for dims, count in (((12, 12), pairs_2d), ((8, 8, 8), pairs_3d)):
        for _ in range(count):
            V, W, U = (random_acd_module(dims, rng) for _ in range(3))
            d_vw = erosion_distance(V, W)
            ok = (d_vw == erosion_distance_oracle(V, W)
                  and d_vw == erosion_distance(W, V)
                  and erosion_distance(V, V) == 0
                  # lattice rounding: the triangle inequality holds up to one grid unit
                  and d_vw <= erosion_distance(V, U) + erosion_distance(U, W) + V.unit)
            failures += not ok
        print(f"{'x'.join(map(str, dims))}: {count} random pairs checked")
    print("selftest", "passed" if failures == 0 else f"FAILED ({failures} mismatches)")
    return failures == 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dyncurv", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (("simulate", "simulate flocks and write DMS files"),
                        ("distances", "persistence sets and Hausdorff erosion matrices"),
                        ("analyze", "dendrogram, MDS and 1-NN report"),
                        ("run", "simulate, distances and analyze in sequence")):
        _add_config_args(sub.add_parser(name, help=help_))
    e = sub.add_parser("erode", help="erosion distance between two module files")
    e.add_argument("a", type=Path)
    e.add_argument("b", type=Path)
    e.add_argument("--no-validate", action="store_true", help="skip the convexity check")
    s = sub.add_parser("selftest", help="oracle equivalence and axiom checks")
    s.add_argument("--pairs-2d", type=int, default=200)
    s.add_argument("--pairs-3d", type=int, default=50)
    s.add_argument("--seed", type=int, default=0)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    from . import pipeline
    try:
        if args.command == "erode":
            print(f"{cmd_erode(args.a, args.b, validate=not args.no_validate):.12g}")
            return 0
        if args.command == "selftest":
            return 0 if selftest(args.pairs_2d, args.pairs_3d, args.seed) else 1
        cfg = _config(args)
        if args.command == "simulate":
            for p in pipeline.cmd_simulate(cfg):
                print(p)
        elif args.command == "distances":
            for p in pipeline.cmd_distances(cfg).values():
                print(p)
        elif args.command == "analyze":
            out = pipeline.cmd_analyze(cfg)
            print(out["report"].read_text(), end="")
        elif args.command == "run":
            out = pipeline.run_all(cfg)
            print(out["report"].read_text(), end="")
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

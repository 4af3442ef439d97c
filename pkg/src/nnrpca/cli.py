"""Command-line entry point: ``nnrpca <subcommand> [options]``."""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

import numpy as np

from . import experiments as ex
from .certificates import (
    check_det_asymmetric,
    check_det_symmetric,
    observation_margin,
)
from .generators import random_symmetric_instance
from .io import FormatError, format_instance, load_instance, save_instance
from .model import ASYMMETRIC, RANK_R, SYMMETRIC
from .solver import SolverConfig, solve_asymmetric, solve_rank_r, solve_symmetric

EXIT_INPUT = 2


def _floats(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _common(p: argparse.ArgumentParser, trials: Optional[int] = None) -> None:
    p.add_argument("--seed", type=int, default=0)
    if trials is not None:
        p.add_argument("--trials", type=int, default=trials)
    p.add_argument("--out", default="-", help="output path ('-' for stdout)")
    p.add_argument("--tol", type=float, default=ex.RECOVERY_TOL, help="recovery threshold")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nnrpca", description="Non-negative rank-1 robust PCA toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("heatmap", help="recovery rate over (n, d)")
    _common(p, trials=100)
    p.add_argument("--n", type=_ints, default=[10, 20, 30, 40, 50, 60, 70, 80, 90, 100])
    p.add_argument("--d", type=_floats, default=[0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5])
    p.add_argument("--p", type=float, default=1.0, help="sampling rate")

    p = sub.add_parser("runtime", help="wall time per solve")
    _common(p, trials=10)
    p.add_argument("--n", type=_ints, default=[100, 200, 400])
    p.add_argument("--d", type=float, default=0.2)

    p = sub.add_parser("histogram", help="recovery errors on the spurious-minimum counterexample")
    _common(p, trials=1000)

    p = sub.add_parser("rank-sweep", help="rank-r success rate over (r, d)")
    _common(p, trials=100)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--r", type=_ints, default=[2, 3, 4, 5])
    p.add_argument("--d", type=_floats, default=[0.0, 0.1, 0.2, 0.25, 0.3])

    p = sub.add_parser("video", help="background/foreground split of PGM frames")
    _common(p)
    p.add_argument("frames", help="directory of P5 PGM frames")
    p.add_argument("--max-iters", type=int, default=SolverConfig().max_iters)

    p = sub.add_parser("graph-mc", help="random-graph bounds vs Monte Carlo")
    _common(p, trials=2000)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--m", type=int, default=None, help="row count for the bipartite model")
    p.add_argument("--p", type=float, default=None, help="sampling rate (default: threshold)")
    p.add_argument("--eta", type=float, default=1.0)

    p = sub.add_parser("certify", help="run the deterministic certificate on an instance file")
    _common(p)
    p.add_argument("instance")
    p.add_argument("--c", type=float, default=None, help="constant c (default: largest admissible)")

    p = sub.add_parser("solve", help="solve one instance file")
    _common(p)
    p.add_argument("instance")
    p.add_argument("--max-iters", type=int, default=SolverConfig().max_iters)

    p = sub.add_parser("generate", help="write a random symmetric instance file")
    _common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=float, default=0.0)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--lo", type=float, default=0.0)
    p.add_argument("--hi", type=float, default=2.0)
    return ap


def _emit(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _fmt(x) -> str:
    return " ".join(repr(float(v)) for v in np.asarray(x).reshape(-1))


def _solve(args) -> None:
    inst = load_instance(args.instance)
    cfg = SolverConfig(max_iters=args.max_iters, rng_seed=args.seed)
    if inst.kind == SYMMETRIC:
        res = solve_symmetric(inst, cfg=cfg)
        vec = [("u", res.u)]
    elif inst.kind == ASYMMETRIC:
        res = solve_asymmetric(inst, cfg=cfg)
        vec = [("u", res.u), ("v", res.v)]
    else:
        res = solve_rank_r(inst, cfg=cfg)
        vec = [(f"U[{i}]", row) for i, row in enumerate(res.U)]
    lines = [f"kind: {inst.kind}", f"objective: {res.objective!r}", f"iterations: {res.iterations}",
             f"reason: {res.reason}", f"wall_time: {res.wall_time:.6f}"]
    if res.recovery_error is not None:
        lines.append(f"recovery_error: {res.recovery_error!r}")
        lines.append(f"recovered: {str(res.recovery_error <= args.tol).lower()}")
    lines += [f"{name}: {_fmt(x)}" for name, x in vec]
    _emit("\n".join(lines) + "\n", args.out)


def _certify(args) -> None:
    inst = load_instance(args.instance)
    if inst.kind == RANK_R:
        raise ValueError("certificates apply to rank-1 instances only")
    if inst.truth is None:
        raise ValueError("certificates need the ground truth in the instance file")
    c = args.c if args.c is not None else observation_margin(inst)
    if not 0 < c <= 1:
        rows = [("theorem", "condition", "lhs", "relation", "rhs", "pass"),
                ("assumption", "c_positive", repr(float(c)), ">", "0.0", 0)]
    elif inst.kind == SYMMETRIC:
        rows = check_det_symmetric(inst, c).rows()
    else:
        rows = check_det_asymmetric(inst, c).rows()
    ex.write_csv(rows, args.out)


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if getattr(args, "trials", 1) < 1:
            raise ValueError("--trials must be >= 1")
        cmd = args.command
        if cmd == "heatmap":
            ex.write_csv(ex.run_heatmap(args.n, args.d, args.trials, args.seed, args.tol, args.p), args.out)
        elif cmd == "runtime":
            ex.write_csv(ex.run_runtime(args.n, args.trials, args.seed, args.d), args.out)
        elif cmd == "histogram":
            rows, summary = ex.run_histogram(args.trials, args.seed, args.tol)
            ex.write_csv(rows, args.out)
            print(f"recovered={summary.recovered:.4f} spurious={summary.spurious:.4f}", file=sys.stderr)
        elif cmd == "rank-sweep":
            ex.write_csv(ex.run_rank_sweep(args.n, args.r, args.d, args.trials, args.seed, args.tol), args.out)
        elif cmd == "video":
            if args.out == "-":
                raise ValueError("video needs --out DIR")
            res = ex.run_video(args.frames, args.out, SolverConfig(max_iters=args.max_iters, rng_seed=args.seed))
            print(f"frames={len(res.frame_names)} objective={res.objective!r} "
                  f"iterations={res.iterations}", file=sys.stderr)
        elif cmd == "graph-mc":
            ex.write_csv(ex.run_graph_montecarlo(args.n, args.p, args.trials, args.seed, args.m, args.eta), args.out)
        elif cmd == "certify":
            _certify(args)
        elif cmd == "solve":
            _solve(args)
        elif cmd == "generate":
            inst = random_symmetric_instance(args.n, args.d, args.seed, args.lo, args.hi, args.p)
            if args.out == "-":
                sys.stdout.write(format_instance(inst))
            else:
                save_instance(inst, args.out)
    except (FormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: list examples, run convergence studies, and
verify the stencil generators against their closed-form oracles.

The HIFD_THREADS environment variable caps the BLAS/solver thread pools.
"""

from __future__ import annotations

import argparse
import os
import sys


def _apply_thread_cap():
    cap = os.environ.get("HIFD_THREADS")
    if not cap:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, cap)
    try:
        import threadpoolctl
        threadpoolctl.threadpool_limits(int(cap))
    except Exception:
        pass


def _parse_levels(text: str):
    try:
        a, b = text.split(":")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"levels must look like 4:6, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hifd",
        description="Hybrid high-order finite differences for elliptic interface problems")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list the built-in example problems")

    run = sub.add_parser("run", help="run a convergence study")
    run.add_argument("--example", required=True, help="example key (see 'list')")
    run.add_argument("--levels", type=_parse_levels, default=None,
                     help="refinement range a:b (defaults per example)")
    run.add_argument("--scheme", choices=("hybrid", "compact9"), default="hybrid")
    run.add_argument("--out", default="out", help="output directory for reports")
    run.add_argument("--kappa", action="store_true",
                     help="estimate the condition number per level (1-norm estimate)")
    run.add_argument("--dump-system", action="store_true",
                     help="dump each level's linear system as text triplets")

    sub.add_parser("verify-stencils",
                   help="check generated stencils against the closed-form tables")
    return p


def cmd_list() -> int:
    from .registry import EXAMPLES
    width = max(len(k) for k in EXAMPLES)
    for key, ex in EXAMPLES.items():
        levels = f"J={ex.default_levels[0]}..{ex.default_levels[1]}"
        kind = "known u " if ex.known_u else "unknown u"
        print(f"{key:<{width}}  [{kind}, default {levels}]  {ex.description}")
    return 0


def cmd_run(args) -> int:
    from pathlib import Path

    from .convergence import (emit_outputs, report_markdown, run_convergence,
                              solve_example)
    from .registry import EXAMPLES, build_problem

    if args.example not in EXAMPLES:
        print(f"unknown example {args.example!r}; try 'hifd list'", file=sys.stderr)
        return 2
    levels = args.levels or EXAMPLES[args.example].default_levels
    report = run_convergence(args.example, levels, scheme=args.scheme,
                             kappa=args.kappa,
                             progress=lambda msg: print(msg, flush=True))
    written = emit_outputs(report, args.out)
    if args.dump_system:
        problem = build_problem(args.example)
        for J in range(levels[0], levels[1] + 1):
            path = Path(args.out) / f"{args.example}_{args.scheme}_J{J}_system.txt"
            solve_example(problem, J, scheme=args.scheme, dump_path=str(path))
            written.append(path)
    print()
    print(report_markdown(report))
    print("wrote: " + ", ".join(str(p) for p in written))
    return 0


def cmd_verify() -> int:
    from .verification import run_all_checks
    results = run_all_checks()
    ok = True
    for name, err, passed in results:
        status = "PASS" if passed else "FAIL"
        print(f"[{status}] {name}: max relative deviation {err:.3e}")
        ok &= passed
    return 0 if ok else 1


def main(argv=None) -> int:
    _apply_thread_cap()
    args = build_parser().parse_args(argv)
    if args.command == "list":
        return cmd_list()
    if args.command == "run":
        return cmd_run(args)
    if args.command == "verify-stencils":
        return cmd_verify()
    return 2


if __name__ == "__main__":
    raise SystemExit(main())

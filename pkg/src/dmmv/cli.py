"""Command-line front end.

Subcommands: ``solve``, ``gen-fir``, ``gen-tomo``, ``gen-quant``,
``gen-subsetsum``, ``oracle``, ``export-lp``.  Generators write instance
text to stdout unless ``--out`` is given, so they pipe straight into
``solve --instance -``.

Exit codes: 0 success, 2 usage error, 3 unreadable or invalid input,
4 oracle budget refusal.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .builders import (
    FirSpec,
    QuantSpec,
    SubsetSumSpec,
    TomoSpec,
    build_fir,
    build_quant,
    build_subsetsum,
    build_tomo,
)
from .controller import SolverConfig, solve
from .core import Instance, ValueSet
from .io import (
    InstanceParseError,
    export_lp,
    format_values,
    read_instance,
    write_instance,
)
from .oracle import DEFAULT_BUDGET, BudgetExceededError, brute_force


@dataclass
class RunArtifacts:
    """Paths a solve run writes: report, iteration trace, solution vector."""

    report: Path
    trace: Path
    solution: Path


def _parse_bands(text: str) -> list[tuple]:
    bands = []
    for part in text.split(","):
        fields = part.strip().split(":")
        if len(fields) not in (3, 4):
            raise argparse.ArgumentTypeError(
                f"band {part!r} must be lo:hi:desired or lo:hi:desired:weight"
            )
        try:
            bands.append(tuple(float(f) for f in fields))
        except ValueError:
            raise argparse.ArgumentTypeError(f"band {part!r} has a non-numeric field")
    return bands


def _read_instance_arg(path: str) -> Instance:
    if path == "-":
        return read_instance(sys.stdin)
    return read_instance(path)


def _emit_instance(inst: Instance, out: str | None) -> None:
    if out is None:
        write_instance(inst, sys.stdout)
    else:
        write_instance(inst, out)


def _emit_truth(truth: np.ndarray, out: str | None) -> None:
    # ground-truth sidecar only makes sense next to a file
    if out is not None:
        Path(out + ".truth").write_text(format_values(np.ravel(truth)) + "\n")


def cmd_solve(args: argparse.Namespace) -> int:
    inst = _read_instance_arg(args.instance)
    cfg = SolverConfig(
        destroy_rate=args.destroy_rate,
        alpha=args.alpha,
        k_eps=args.k_eps,
        max_iters=args.iters,
        time_limit=args.time_limit,
        seed=args.seed,
        max_candidates=args.max_candidates,
        workers=args.workers,
    )
    report = solve(inst, cfg)

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = RunArtifacts(
        report=outdir / "report.txt",
        trace=outdir / "trace.csv",
        solution=outdir / "solution.txt",
    )

    lines = [
        f"solver_version: {__version__}",
        f"instance: {args.instance}",
        f"m: {inst.m}",
        f"n: {inst.n}",
        f"levels: {len(inst.values)}",
        f"seed: {cfg.seed}",
        f"iters_requested: {cfg.max_iters}",
        f"time_limit: {cfg.time_limit}",
        f"destroy_rate: {cfg.destroy_rate}",
        f"alpha: {cfg.alpha}",
        f"k_eps: {cfg.k_eps}",
        f"max_candidates: {cfg.max_candidates}",
        f"workers: {cfg.workers}",
        f"initial_objective: {report.initial_objective!r}",
        f"best_objective: {report.best.objective!r}",
        f"iterations_run: {report.iterations}",
        f"wall_time_s: {report.wall_time:.3f}",
    ]
    paths.report.write_text("\n".join(lines) + "\n")

    with open(paths.trace, "w") as fh:
        fh.write("iter,current_t,best_t,op_pair,accepted\n")
        for row in report.trace:
            fh.write(
                f"{row.iteration},{row.current_t!r},{row.best_t!r},"
                f"{row.op_pair},{int(row.accepted)}\n"
            )

    from .io import write_solution

    write_solution(report.best, inst, paths.solution)

    print(f"best_objective: {report.best.objective!r}")
    print(f"initial_objective: {report.initial_objective!r}")
    print(f"report: {paths.report}")
    return 0


def cmd_gen_fir(args: argparse.Namespace) -> int:
    spec = FirSpec(
        order=args.order,
        bits=args.bits,
        bands=args.bands,
        gain=args.gain,
        grid_mult=args.grid_mult,
    )
    _emit_instance(build_fir(spec), args.out)
    return 0


def cmd_gen_tomo(args: argparse.Namespace) -> int:
    spec = TomoSpec(
        side=args.side,
        gray_levels=ValueSet(np.arange(args.levels, dtype=float)),
        n_angles=args.angles,
        noise=args.noise,
        seed=args.seed,
        phantom=args.phantom,
        sirt_iters=args.sirt_iters,
    )
    inst, truth = build_tomo(spec)
    _emit_instance(inst, args.out)
    _emit_truth(truth, args.out)
    return 0


def cmd_gen_quant(args: argparse.Namespace) -> int:
    spec = QuantSpec(dim=args.dim, calib=args.calib, bits=args.bits, seed=args.seed)
    inst, w = build_quant(spec)
    _emit_instance(inst, args.out)
    _emit_truth(w, args.out)
    return 0


def cmd_gen_subsetsum(args: argparse.Namespace) -> int:
    spec = SubsetSumSpec(weights=tuple(args.weights), target=args.target)
    _emit_instance(build_subsetsum(spec), args.out)
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    inst = _read_instance_arg(args.instance)
    result = brute_force(inst, budget=args.budget)
    print(f"optimal_objective: {result.best_t!r}")
    print("optimal_x: " + format_values(inst.values.levels[result.best_idx]))
    print(f"enumerated: {result.enumerated}")
    return 0


def cmd_export_lp(args: argparse.Namespace) -> int:
    inst = _read_instance_arg(args.instance)
    if args.out is None:
        export_lp(inst, sys.stdout)
    else:
        export_lp(inst, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dmmv",
        description="Heuristic and exact solvers for discrete min-max violation problems.",
    )
    parser.add_argument("--version", action="version", version=f"dmmv {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run the adaptive solver on an instance file")
    p.add_argument("--instance", required=True, help="instance path, or - for stdin")
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--destroy-rate", type=float, default=0.005)
    p.add_argument("--alpha", type=float, default=0.3)
    p.add_argument("--k-eps", type=int, default=100)
    p.add_argument("--max-candidates", type=int, default=5000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=".", help="directory for report/trace/solution files")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen-fir", help="generate a quantized FIR design instance")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--bits", type=int, required=True)
    p.add_argument(
        "--bands",
        type=_parse_bands,
        required=True,
        help='comma-separated "lo:hi:desired[:weight]" bands in radians',
    )
    p.add_argument("--grid-mult", type=int, default=16)
    p.add_argument("--gain", type=float, default=1.0)
    p.add_argument("--out", default=None, help="instance path (stdout when omitted)")
    p.set_defaults(func=cmd_gen_fir)

    p = sub.add_parser("gen-tomo", help="generate a discrete tomography instance")
    p.add_argument("--side", type=int, required=True)
    p.add_argument("--angles", type=int, required=True)
    p.add_argument("--levels", type=int, required=True, help="number of gray levels 0..L-1")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--phantom", choices=("disk", "squares", "checker"), default="disk")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sirt-iters", type=int, default=500)
    p.add_argument("--out", default=None, help="instance path (stdout when omitted)")
    p.set_defaults(func=cmd_gen_tomo)

    p = sub.add_parser("gen-quant", help="generate a weight quantization instance")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--calib", type=int, required=True)
    p.add_argument("--bits", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="instance path (stdout when omitted)")
    p.set_defaults(func=cmd_gen_quant)

    p = sub.add_parser("gen-subsetsum", help="generate a subset-sum instance")
    p.add_argument("--weights", type=int, nargs="+", required=True)
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--out", default=None, help="instance path (stdout when omitted)")
    p.set_defaults(func=cmd_gen_subsetsum)

    p = sub.add_parser("oracle", help="solve exactly by bounded enumeration")
    p.add_argument("--instance", required=True, help="instance path, or - for stdin")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("export-lp", help="export the exact MILP in LP format")
    p.add_argument("--instance", required=True, help="instance path, or - for stdin")
    p.add_argument("--out", default=None, help="LP path (stdout when omitted)")
    p.set_defaults(func=cmd_export_lp)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"dmmv: {exc}", file=sys.stderr)
        return 4
    except (InstanceParseError, OSError, ValueError) as exc:
        print(f"dmmv: {exc}", file=sys.stderr)
        return 3


def run() -> None:
    raise SystemExit(main(sys.argv[1:]))

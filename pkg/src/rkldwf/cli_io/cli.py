"""
Command-line interface.

    rkldwf gen    --model gaussian --n 64 --alpha 6 --seed 7 --out data/
    rkldwf solve  --in data/ --preset rkld-wf-gaussian --out result.json --trace trace.csv
    rkldwf bench  --config config/experiments/success_vs_alpha.yaml --out results/alpha.csv

Exit codes: 0 success, 1 I/O failure, 2 usage or validation error. Errors are
reported on stderr as one JSON object {"error", "message", "file"}.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from ..core.errors import ArgumentError, ArrayFileError, ConfigError
from ..core.linalg import align_phase
from ..core.rng import Rng
from ..harness.experiment import SignalKind, run_experiment, signal_draw
from ..metrics.evaluation import correlation
from ..models.generation import (
    CorruptionSpec,
    ModelKind,
    ProblemInstance,
    ProblemMeta,
    generate_problem,
)
from ..models.operators import CdpOperator, DenseOperator, MeasurementOperator
from ..solver.config import PRESETS, SolverConfig, preset
from ..solver.runner import run
from .arrayfile import read_array, write_array
from .config_file import Settings, load_experiment, load_settings, load_solver_config
from .logs import LOG_FORMATS, configure_logging
from .results import (
    sibling_path,
    write_aggregates_csv,
    write_curves_csv,
    write_json,
    write_trace_csv,
    write_trials_csv,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2

DEFAULT_PRESET = "rkld-wf-gaussian"
OUTPUT_SCHEMA_VERSION = 1


class UsageError(ArgumentError):
    """Bad command-line flags."""


class InputError(ArgumentError):
    """Input files that parse but do not fit together."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(message)
        self.path = path


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rkldwf", description="Phase retrieval with reverse-KL Wirtinger flow")
    parser.add_argument("--log-level", default=None,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Logging level")
    parser.add_argument("--log-format", default=None, choices=LOG_FORMATS, help="Log line format")
    parser.add_argument("--settings", type=Path, default=None,
                        help="Settings YAML with logging and solver defaults")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="Generate a synthetic problem instance")
    gen.add_argument("--model", required=True, choices=[m.value for m in ModelKind])
    gen.add_argument("--n", type=int, required=True, help="Signal length N")
    gen.add_argument("--alpha", type=float, default=6.0, help="Oversampling factor (gaussian)")
    gen.add_argument("--l-patterns", type=int, default=8, help="Number of patterns (cdp)")
    gen.add_argument("--sigma", type=float, default=0.0, help="Uniform noise level")
    gen.add_argument("--theta", type=float, default=0.0, help="Outlier magnitude")
    gen.add_argument("--rho", type=float, default=0.0, help="Outlier fraction")
    gen.add_argument("--signed-outliers", action="store_true")
    gen.add_argument("--signal", default=SignalKind.COMPLEX_GAUSSIAN.value,
                     choices=[s.value for s in SignalKind])
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", type=Path, required=True, help="Output directory")

    solve = commands.add_parser("solve", help="Run one solver on a problem instance")
    source = solve.add_mutually_exclusive_group(required=True)
    source.add_argument("--in", dest="in_dir", type=Path, help="Directory written by gen")
    source.add_argument("--a", type=Path, help="Dense measurement matrix (.rkph)")
    source.add_argument("--patterns", type=Path, help="CDP patterns L x N (.rkph)")
    solve.add_argument("--y", type=Path, help="Measurements (.rkph), with --a or --patterns")
    solve.add_argument("--x", type=Path, help="Optional ground truth (.rkph)")
    method = solve.add_mutually_exclusive_group()
    method.add_argument("--preset", help=f"One of: {', '.join(sorted(PRESETS))}")
    method.add_argument("--config", type=Path, help="Solver YAML document")
    solve.add_argument("--max-iters", type=int, default=None)
    solve.add_argument("--seed", type=int, default=None, help="Seed of the spectral initializer")
    solve.add_argument("--out", type=Path, required=True, help="Result summary (JSON)")
    solve.add_argument("--trace", type=Path, default=None, help="Per-iteration trace (CSV)")
    solve.add_argument("--z-out", type=Path, default=None,
                       help="Reconstruction (.rkph), phase-aligned to the ground truth if given")

    bench = commands.add_parser("bench", help="Run a Monte-Carlo experiment")
    bench.add_argument("--config", type=Path, required=True, help="Experiment YAML document")
    bench.add_argument("--out", type=Path, required=True, help="Trial table (CSV)")
    bench.add_argument("--threads", type=int, default=None)
    return parser


def _operator_file(model: ModelKind) -> str:
    return "A.rkph" if model is ModelKind.GAUSSIAN else "patterns.rkph"


def cmd_gen(args: argparse.Namespace, settings: Settings) -> int:
    model = ModelKind(args.model)
    if args.n < 1:
        raise UsageError(f"--n must be positive, got {args.n}")
    corruption = CorruptionSpec(sigma=args.sigma, theta=args.theta, rho=args.rho,
                                signed_outliers=args.signed_outliers)
    signal = SignalKind(args.signal)
    x = signal_draw(signal, args.n, Rng(args.seed).spawn("signal"))
    problem = generate_problem(model, x, Rng(args.seed), alpha=args.alpha,
                               l_patterns=args.l_patterns, corruption=corruption, seed=args.seed)

    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    if isinstance(problem.op, CdpOperator):
        write_array(out / "patterns.rkph", problem.op.patterns, "c64")
    else:
        write_array(out / "A.rkph", problem.op.to_dense(), "c64")
    write_array(out / "y.rkph", problem.y, "f64")
    write_array(out / "x_true.rkph", problem.x_true, "c64")

    meta = problem.meta.to_dict()
    meta.update({
        "schema_version": OUTPUT_SCHEMA_VERSION,
        "operator_file": _operator_file(model),
        "signal": signal.value,
    })
    write_json(out / "meta.json", meta)
    logger.info("Wrote %s problem with M=%d N=%d to %s", model.value, problem.op.m, args.n, out)
    return EXIT_OK


def _read_measurements(path: Path) -> np.ndarray:
    y = read_array(path)
    if y.ndim != 1:
        raise InputError(f"Measurements must be a vector, got shape {y.shape}", str(path))
    if np.iscomplexobj(y):
        if np.any(y.imag != 0):
            raise InputError("Measurements must be real", str(path))
        y = y.real
    if np.any(y < 0) or not np.all(np.isfinite(y)):
        raise InputError("Measurements must be finite and nonnegative", str(path))
    return np.asarray(y, dtype=np.float64)


def _read_operator(path: Path, cdp: bool) -> MeasurementOperator:
    data = read_array(path)
    if data.ndim != 2:
        raise InputError(f"Operator must be a matrix, got shape {data.shape}", str(path))
    data = data.astype(np.complex128)
    return CdpOperator(data) if cdp else DenseOperator(data)


def _read_meta(meta_path: Path) -> dict:
    try:
        meta_data = json.loads(meta_path.read_text(encoding="utf-8"))
    except UnicodeDecodeError as exc:
        raise InputError(f"meta.json is not UTF-8 text: {exc.reason}", str(meta_path)) from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"Invalid JSON: {exc.msg}", str(meta_path)) from exc
    if not isinstance(meta_data, dict):
        raise InputError("meta.json must hold a JSON object", str(meta_path))
    if not isinstance(meta_data.get("operator_file", "A.rkph"), str):
        raise InputError("operator_file must be a string", str(meta_path))
    seed = meta_data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise InputError(f"seed must be a nonnegative integer, got {seed!r}", str(meta_path))
    return meta_data


def load_problem(args: argparse.Namespace) -> ProblemInstance:
    """Assemble a problem from a gen directory or from --a/--patterns, --y and --x."""
    x_path: Optional[Path] = args.x
    if args.in_dir is not None:
        in_dir: Path = args.in_dir
        meta_path = in_dir / "meta.json"
        meta_data = _read_meta(meta_path)
        op_path = in_dir / meta_data.get("operator_file", "A.rkph")
        op = _read_operator(op_path, cdp=op_path.name == "patterns.rkph")
        y_path = in_dir / "y.rkph"
        if x_path is None and (in_dir / "x_true.rkph").exists():
            x_path = in_dir / "x_true.rkph"
        meta = ProblemMeta(model=str(meta_data.get("model", "external")),
                           seed=int(meta_data.get("seed", 0)))
    else:
        if args.y is None:
            raise UsageError("--y is required with --a or --patterns")
        op_path = args.a if args.a is not None else args.patterns
        op = _read_operator(op_path, cdp=args.patterns is not None)
        y_path = args.y
        meta = ProblemMeta(model="external")

    y = _read_measurements(y_path)
    if y.shape[0] != op.m:
        raise InputError(f"{y.shape[0]} measurements do not match {op.m} operator rows",
                         str(y_path))
    x_true = None
    if x_path is not None:
        x_true = read_array(x_path)
        if x_true.shape != (op.n,):
            raise InputError(f"Ground truth has shape {x_true.shape}, operator has {op.n} columns",
                             str(x_path))
    if args.seed is not None:
        meta.seed = args.seed
    return ProblemInstance(op=op, y=y, x_true=x_true, meta=meta)


def _solver_config(args: argparse.Namespace, settings: Settings) -> SolverConfig:
    if args.config is not None:
        config = load_solver_config(args.config)
    elif args.preset is not None:
        config = preset(args.preset)
    elif settings.solver is not None:
        config = settings.solver
    else:
        config = preset(DEFAULT_PRESET)
    if args.max_iters is not None:
        config = config.with_overrides(max_iters=args.max_iters)
    return config


def cmd_solve(args: argparse.Namespace, settings: Settings) -> int:
    config = _solver_config(args, settings)
    problem = load_problem(args)
    result = run(problem, config)

    summary = result.to_dict()
    summary.update({
        "schema_version": OUTPUT_SCHEMA_VERSION,
        "m": problem.op.m,
        "n": problem.op.n,
        "solver": config.to_dict(),
        "problem": problem.meta.to_dict(),
        "operator": problem.op.get_info(),
    })
    z_final = result.z_final
    if problem.x_true is not None and np.all(np.isfinite(z_final)) and np.any(z_final):
        summary["acc"] = correlation(problem.x_true, z_final)
        z_final = align_phase(problem.x_true, z_final)
    write_json(args.out, summary)
    if args.trace is not None:
        write_trace_csv(args.trace, result.trace)
    if args.z_out is not None:
        write_array(args.z_out, z_final, "c64")
    logger.info("Solve finished after %d iterations", result.iterations_used)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace, settings: Settings) -> int:
    spec = load_experiment(args.config, settings.experiment_defaults)
    if args.threads is not None and args.threads < 1:
        raise UsageError(f"--threads must be >= 1, got {args.threads}")
    table = run_experiment(spec, threads=args.threads)

    out: Path = args.out
    out.parent.mkdir(parents=True, exist_ok=True)
    write_trials_csv(out, table.records)
    write_aggregates_csv(sibling_path(out, "_aggregates.csv"), table.aggregates)
    if spec.curves:
        write_curves_csv(sibling_path(out, "_curves.csv"), table.curve_rows)
    write_json(sibling_path(out, "_meta.json"), table.metadata)
    logger.info("Wrote %d trial rows and %d aggregate rows", len(table.records),
                len(table.aggregates))
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "solve": cmd_solve, "bench": cmd_bench}


def _report(kind: str, message: str, path: Optional[str] = None) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "file": path},
                                sort_keys=True) + "\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    args_list: List[str] = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(args_list)
        settings = load_settings(args.settings) if args.settings is not None else Settings()
        configure_logging(
            args.log_level or settings.log_level,
            args.log_format or settings.log_format,
            settings.include_timestamps,
        )
        return COMMANDS[args.command](args, settings)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        _report("usage", str(exc))
        return EXIT_USAGE
    except InputError as exc:
        _report("input", str(exc), exc.path or None)
        return EXIT_USAGE
    except ConfigError as exc:
        _report("config", str(exc), exc.path or None)
        return EXIT_USAGE
    except ArrayFileError as exc:
        _report(exc.kind, str(exc), exc.path or None)
        return EXIT_USAGE
    except ArgumentError as exc:
        _report("argument", str(exc))
        return EXIT_USAGE
    except OSError as exc:
        _report("io", exc.strerror or str(exc), exc.filename)
        return EXIT_IO
    except json.JSONDecodeError as exc:
        _report("input", f"Invalid JSON: {exc.msg}")
        return EXIT_USAGE
    except UnicodeDecodeError as exc:
        _report("input", f"Input is not UTF-8 text: {exc.reason}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

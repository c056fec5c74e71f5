#  SPDX-License-Identifier: GPL-3.0-or-later

"""The qoc-bounds command line.

Usage:

  qoc-bounds propagate --config run.json [--pulse pulse.json]
  qoc-bounds lie-rank --config run.json
  qoc-bounds optimize --config run.json [--restarts 3] [--budget 2000]
                      [--pulse-csv pulse.csv]
  qoc-bounds bounds --config run.json [--pulse pulse.json]
  qoc-bounds sweep --config sweep.json --out results/

Every command takes --config, --out, --seed, --workers, -v and -q.
Results are written as JSON to <out>/<command>.json, or to the
screen when --out is not given. The sweep writes
<out>/sweep_<variable>.csv and <out>/manifest.json and needs an
output directory, either from --out or the configuration's
output_path.

"""

import argparse
from dataclasses import replace
import json
import logging
from pathlib import Path
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__
from .bounds import evaluate_bounds, qsl_time, time_averaged_norm, \
    max_generator_norm
from .config import ExperimentConfig, SweepVariable, load_config
from .controllability import MAX_CLOSURE_DIM, ClosureNotConvergedError, \
    lie_closure, manifold_dim, reachable_dim
from .dynamics import propagate
from .harness import BoundViolationError, build_problem, crab_basis, \
    fit_noise_slope, knee_ratio, propagation_config, pulse_template, \
    run_sweep, system_dimension, write_csv, write_manifest
from .optimizer import OptimizationError, best_pulse, distance, objective, \
    optimize
from .presets import build_system
from .pulse import ControlPulse, info_content, parameter_count, \
    pulse_from_dict, pulse_to_dict, write_pulse_csv
from .qcore import DensityMatrix, PureState


__all__ = ("main", "make_parser")


logger = logging.getLogger(__name__)


def _shared() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config", type=Path,
                        help="The JSON experiment configuration")
    parser.add_argument("--out", type=Path,
                        help="The output directory")
    parser.add_argument("--seed", type=int,
                        help="Override the seed (sweeps use seed, seed + 1, ...)")
    parser.add_argument("--workers", type=int, default=1,
                        help="Worker processes; 0 uses every CPU")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="More output (repeat for debug messages)")
    parser.add_argument("-q", "--quiet", action="store_true",
                        help="Only report errors")
    return parser


def make_parser() -> argparse.ArgumentParser:
    """The argument parser for the qoc-bounds command."""

    shared = _shared()
    parser = argparse.ArgumentParser(prog="qoc-bounds",
                                     description="Bandwidth-limited quantum control "
                                     "and its information bounds.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    cmd = sub.add_parser("propagate", parents=[shared],
                         help="Evolve the initial object under a pulse")
    cmd.add_argument("--pulse", type=Path,
                     help="A pulse written by the optimize command")

    sub.add_parser("lie-rank", parents=[shared],
                   help="Compute the dynamical Lie algebra")

    cmd = sub.add_parser("optimize", parents=[shared],
                         help="Search for the best CRAB pulse")
    cmd.add_argument("--restarts", type=int)
    cmd.add_argument("--budget", type=int,
                     help="Evaluations per restart")
    cmd.add_argument("--pulse-csv", type=Path,
                     help="Also write the best pulse as (t, gamma)")

    cmd = sub.add_parser("bounds", parents=[shared],
                         help="Evaluate the bounds for a pulse")
    cmd.add_argument("--pulse", type=Path,
                     help="A pulse written by the optimize command")

    sub.add_parser("sweep", parents=[shared],
                   help="Run the configured sweep")
    return parser


def _setup_logging(args: argparse.Namespace) -> None:
    if args.quiet:
        level = logging.ERROR
    elif args.verbose > 1:
        level = logging.DEBUG
    elif args.verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING

    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _read_config(args: argparse.Namespace) -> ExperimentConfig:
    if args.config is None:
        logger.info("No --config given: using the single-qubit pure preset")
        return ExperimentConfig("single-qubit", "pure")

    return load_config(args.config)


def _matrix_json(mat: np.ndarray) -> dict[str, Any]:
    return {"real": np.real(mat).tolist(), "imag": np.imag(mat).tolist()}


def _object_json(obj) -> dict[str, Any]:
    if isinstance(obj, PureState):
        return {"kind": "pure", **_matrix_json(obj.amplitudes)}

    if isinstance(obj, DensityMatrix):
        return {"kind": "density", **_matrix_json(obj.matrix)}

    return {"kind": "unitary", **_matrix_json(obj)}


def _emit(args: argparse.Namespace, data: dict[str, Any]) -> None:
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if args.out is None:
        sys.stdout.write(text)
        return

    args.out.mkdir(parents=True, exist_ok=True)
    path = args.out / f"{args.command}.json"
    path.write_text(text, encoding="utf-8")
    logger.info("Wrote %s", path)


def _pulse(args: argparse.Namespace, cfg: ExperimentConfig) -> ControlPulse:
    """The pulse from --pulse, or the zero-amplitude pulse."""

    params = cfg.fixed_parameters
    if args.pulse is None:
        seed = 0 if args.seed is None else args.seed
        basis = crab_basis(params, seed)
        zeros = np.zeros(parameter_count(basis.n_modes))
        return pulse_template(params).build(basis, zeros)

    data = json.loads(args.pulse.read_text(encoding="utf-8"))
    pulse = pulse_from_dict(data.get("pulse", data))
    if abs(pulse.duration - params.T) > 1e-12 * max(1.0, params.T):
        raise ValueError(f"the pulse has T={pulse.duration} but the "
                         f"configuration has T={params.T}")

    return pulse


def cmd_propagate(args: argparse.Namespace, cfg: ExperimentConfig) -> None:
    params = cfg.fixed_parameters
    h = build_system(cfg.system_preset)
    problem = build_problem(h, cfg.object_kind, params, args.seed or 0)
    pulse = _pulse(args, cfg)
    pcfg = propagation_config(params)

    final = propagate(h, problem.initial, pulse, pcfg)
    _emit(args, {"system": cfg.system_preset.label(),
                 "final": _object_json(final),
                 "distance": distance(final, problem.goal),
                 "objective": objective(problem, pulse, pcfg)})


def cmd_lie_rank(args: argparse.Namespace, cfg: ExperimentConfig) -> None:
    h = build_system(cfg.system_preset)
    closure = lie_closure(h)
    _emit(args, {"system": cfg.system_preset.label(),
                 "N": closure.dim,
                 "dimension": closure.dimension,
                 "su_dimension": closure.su_dimension,
                 "controllable": closure.controllable,
                 "converged": closure.converged,
                 "depth": closure.depth_reached,
                 "object_kind": cfg.object_kind.value,
                 "D_W": reachable_dim(closure, cfg.object_kind),
                 "manifold_dim": manifold_dim(closure, cfg.object_kind)})


def cmd_optimize(args: argparse.Namespace, cfg: ExperimentConfig) -> None:
    params = cfg.fixed_parameters
    if args.restarts is not None:
        params = replace(params, restarts=args.restarts)

    budget = cfg.budget if args.budget is None else args.budget
    seed = cfg.seeds[0] if args.seed is None else args.seed

    h = build_system(cfg.system_preset)
    problem = build_problem(h, cfg.object_kind, params, seed)
    basis = crab_basis(params, seed)
    tmpl = pulse_template(params)
    pcfg = propagation_config(params)
    result = optimize(problem, basis, restarts=params.restarts, budget=budget,
                      seed=seed, template=tmpl, cfg=pcfg, workers=args.workers)
    pulse = best_pulse(result, basis, tmpl)

    d_w = system_dimension(h, cfg.object_kind)
    t_qsl = qsl_time(problem.initial, problem.goal,
                     max_generator_norm(h, pulse.window))
    report = evaluate_bounds(info_content(pulse), d_w, t_qsl=t_qsl,
                             epsilon=problem.epsilon)

    if args.pulse_csv is not None:
        write_pulse_csv(args.pulse_csv, pulse)

    _emit(args, {"system": cfg.system_preset.label(),
                 "result": result.to_dict(),
                 "pulse": pulse_to_dict(pulse),
                 "bounds": report.to_dict()})


def cmd_bounds(args: argparse.Namespace, cfg: ExperimentConfig) -> None:
    """The bounds use the time-averaged norm of the pulse's generator.

    Above `MAX_CLOSURE_DIM` the system is assumed controllable and no
    manifold dimension is reported.
    """

    params = cfg.fixed_parameters
    h = build_system(cfg.system_preset)
    problem = build_problem(h, cfg.object_kind, params, args.seed or 0)
    pulse = _pulse(args, cfg)
    pcfg = propagation_config(params)

    mdim = None
    if h.dim > MAX_CLOSURE_DIM:
        d_w = system_dimension(h, cfg.object_kind)
    else:
        closure = lie_closure(h)
        d_w = reachable_dim(closure, cfg.object_kind)
        mdim = manifold_dim(closure, cfg.object_kind)

    lbar = time_averaged_norm(h, pulse, pcfg)
    vmax = max_generator_norm(h, pulse.window)
    report = evaluate_bounds(info_content(pulse), d_w,
                             t_qsl=qsl_time(problem.initial, problem.goal, lbar),
                             epsilon=params.epsilon, v_max=vmax)
    _emit(args, {"system": cfg.system_preset.label(),
                 "lambda_bar": lbar,
                 "v_max": vmax,
                 "manifold_dim": mdim,
                 "bounds": report.to_dict()})


def _summary(cfg: ExperimentConfig, records) -> dict[str, Any]:
    out: dict[str, Any] = {}
    try:
        if cfg.sweep_variable == SweepVariable.N_MODES:
            out["knee_ratio"] = knee_ratio(records, records[0].d_w)
        elif cfg.sweep_variable == SweepVariable.SNR:
            out["noise_slope"] = fit_noise_slope(
                records, decades=cfg.fixed_parameters.fit_decades)
    except ValueError as exc:
        logger.warning("No sweep summary: %s", exc)

    return out


def cmd_sweep(args: argparse.Namespace, cfg: ExperimentConfig) -> None:
    cfg.check_sweep()
    if args.seed is not None:
        cfg = replace(cfg, seeds=tuple(range(args.seed, args.seed + len(cfg.seeds))))

    outdir = args.out
    if outdir is None:
        if cfg.output_path is None:
            raise ValueError("the sweep needs --out or output_path")

        outdir = Path(cfg.output_path)

    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / f"sweep_{cfg.sweep_variable.value}.csv"
    manifest_path = outdir / "manifest.json"

    try:
        records = run_sweep(cfg, workers=args.workers)
    except BoundViolationError as exc:
        write_csv(exc.records, csv_path)
        write_manifest(manifest_path, cfg, csv_path,
                       {"violations": exc.reasons})
        raise

    write_csv(records, csv_path)
    write_manifest(manifest_path, cfg, csv_path, _summary(cfg, records))


COMMANDS = {"propagate": cmd_propagate,
            "lie-rank": cmd_lie_rank,
            "optimize": cmd_optimize,
            "bounds": cmd_bounds,
            "sweep": cmd_sweep}


def main(argv: Sequence[str] | None = None) -> None:
    """Run the command line; errors are reported on stderr with exit status 1."""

    parser = make_parser()
    args = parser.parse_args(argv)
    _setup_logging(args)

    try:
        cfg = _read_config(args)
        COMMANDS[args.command](args, cfg)
    except (ValueError, TypeError, OSError, OptimizationError,
            ClosureNotConvergedError, BoundViolationError) as exc:
        sys.stderr.write(f"ERROR: {exc}\n")
        sys.exit(1)

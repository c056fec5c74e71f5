#  SPDX-License-Identifier: GPL-3.0-or-later

"""Sweeps that confront optimized pulses with the bounds.

Each sweep varies one quantity (the number of CRAB modes, the
control time, the noise to signal ratio, or the length of the Ising
chain), runs the optimizer once per seed at each value, and records
the achieved objective next to the bounds that apply to it. Every run
is checked with `qoc_bounds.bounds.violations`, and a sweep that
breaks a bound raises `BoundViolationError`.

The records are written as CSV, one row per (sweep value, seed), and
a manifest records the configuration hash, seeds and versions so a
run can be reproduced. The output does not depend on the number of
workers.

"""

from dataclasses import dataclass, replace
import csv
import hashlib
import json
import logging
import math
from pathlib import Path
import platform
from typing import Any, Sequence

import numpy as np
import scipy

from . import __version__
from .bounds import NUMERICAL_FLOOR, evaluate_bounds, max_generator_norm, \
    qsl_time, violations
from .config import ExperimentConfig, PresetName, RunParameters, \
    SweepVariable, config_hash
from .controllability import MAX_CLOSURE_DIM, lie_closure, reachable_dim
from .dynamics import PropagationConfig, control_samples
from .optimizer import ControlProblem, OptimizationResult, best_pulse, \
    objective, optimize
from .parallel import derive_seed, parallel_map
from .presets import build_system, goal_object, initial_object
from .pulse import CrabBasis, Pulse, PulseTemplate, SampledPulse, \
    add_gaussian_noise, info_content, parameter_count
from .qcore import HamiltonianPair, ObjectKind


__all__ = ("CSV_COLUMNS", "MIN_SEEDS", "CLOSURE_MAX_DIM",
           "BoundViolationError", "SeedRun", "SweepRecord",
           "system_dimension", "build_problem", "crab_basis",
           "pulse_template", "propagation_config",
           "sweep_parameter_count", "sweep_time",
           "sweep_noise", "sweep_system_size", "run_sweep", "knee_ratio",
           "fit_noise_slope", "write_csv", "write_manifest", "audit_csv")


CSV_COLUMNS = ("sweep_value", "seed", "best_objective", "n_s", "kappa_s",
               "d_w", "eps_info", "t_min", "t_qsl", "evaluations")

MIN_SEEDS = 3

# Above this Hilbert-space dimension the Lie closure is not computed
# and the system is taken to be controllable.
#
CLOSURE_MAX_DIM = MAX_CLOSURE_DIM

logger = logging.getLogger(__name__)


class BoundViolationError(RuntimeError):
    """A run beat one of the bounds.

    ``records`` holds every record of the sweep and ``reasons`` the
    violations.
    """

    def __init__(self, message: str, records: list["SweepRecord"],
                 reasons: list[str]) -> None:
        super().__init__(message)
        self.records = records
        self.reasons = reasons


@dataclass(frozen=True)
class SeedRun:
    """The outcome for one seed at one sweep value."""

    seed: int
    best_objective: float
    n_s: int
    kappa_s: float
    d_w: int
    eps_info: float
    t_min: float
    t_qsl: float
    evaluations: int
    extras: tuple[tuple[str, Any], ...] = ()
    """Sweep-specific columns, in output order."""

    violations: tuple[str, ...] = ()


@dataclass(frozen=True)
class SweepRecord:
    """All the seeds at one sweep value."""

    sweep_value: float
    horizon: float
    epsilon: float
    runs: tuple[SeedRun, ...]

    @property
    def best_objectives(self) -> list[float]:
        return [run.best_objective for run in self.runs]

    @property
    def median_objective(self) -> float:
        return float(np.median(self.best_objectives))

    @property
    def mean_objective(self) -> float:
        return float(np.mean(self.best_objectives))

    @property
    def evaluations(self) -> int:
        return sum(run.evaluations for run in self.runs)

    @property
    def d_w(self) -> int:
        return self.runs[0].d_w

    def extra(self, name: str) -> list[Any]:
        """The named extra column for each run."""
        return [dict(run.extras).get(name) for run in self.runs]


def system_dimension(h: HamiltonianPair, kind: ObjectKind) -> int:
    """The reachable-set dimension D_W for the system.

    The Lie closure is only computed up to `CLOSURE_MAX_DIM`; larger
    systems are assumed controllable.
    """

    if h.dim > CLOSURE_MAX_DIM:
        logger.info("Skipping the Lie closure for N=%d; assuming control", h.dim)
        return h.dim if kind == ObjectKind.PURE else h.dim * h.dim

    return reachable_dim(lie_closure(h), kind)


@dataclass(frozen=True)
class _Context:
    """What every run at one sweep value needs."""

    cfg: ExperimentConfig
    params: RunParameters
    d_w: int
    value: float
    seed: int


def _system(ctx: _Context) -> HamiltonianPair:
    return build_system(ctx.cfg.system_preset)


def pulse_template(params: RunParameters) -> PulseTemplate:
    """The amplitude settings of the run parameters."""
    return PulseTemplate(gamma0=params.gamma0, gamma_min=params.gamma_min,
                         gamma_max=params.gamma_max,
                         delta_gamma=params.delta_gamma)


def propagation_config(params: RunParameters) -> PropagationConfig:
    return PropagationConfig(params.T, params.segments_per_sample,
                             params.sampling)


def build_problem(h: HamiltonianPair, kind: ObjectKind, params: RunParameters,
                  seed: int) -> ControlProblem:
    """The control problem for one seed.

    A Haar goal is drawn from a seed derived from ``goal_seed`` and
    the run seed, so each seed gets its own goal.
    """

    initial = initial_object(kind, h.dim)
    goal = goal_object(kind, h.dim, params.goal,
                       seed=derive_seed(params.goal_seed, seed))
    weights = (params.penalty,) if params.penalty > 0 else ()
    return ControlProblem(h, initial, goal, params.T, epsilon=params.epsilon,
                          weights=weights)


def crab_basis(params: RunParameters, seed: int) -> CrabBasis:
    """The basis, seeded by ``basis_seed`` when set and the run seed otherwise."""

    bseed = seed if params.basis_seed is None else params.basis_seed
    return CrabBasis(params.n_modes, params.T, seed=bseed,
                     envelope=params.envelope)


def _optimize(ctx: _Context, params: RunParameters
              ) -> tuple[ControlProblem, OptimizationResult, Pulse]:
    h = _system(ctx)
    problem = build_problem(h, ctx.cfg.object_kind, params, ctx.seed)
    basis = crab_basis(params, ctx.seed)
    tmpl = pulse_template(params)
    result = optimize(problem, basis, restarts=params.restarts,
                      budget=ctx.cfg.budget, seed=ctx.seed, template=tmpl,
                      cfg=propagation_config(params))
    return problem, result, best_pulse(result, basis, tmpl)


def _seed_run(ctx: _Context, problem: ControlProblem, pulse: Pulse,
              achieved: float, evaluations: int,
              extras: Sequence[tuple[str, Any]] = (),
              snr_power: float | None = None) -> SeedRun:
    """Evaluate the bounds for a pulse and check the run against them."""

    h = problem.h
    vmax = max_generator_norm(h, pulse.window)
    t_qsl = qsl_time(problem.initial, problem.goal, vmax)
    report = evaluate_bounds(info_content(pulse), ctx.d_w, t_qsl=t_qsl,
                             epsilon=problem.epsilon, snr_power=snr_power)
    # eps_noise is recorded, not enforced: achieved is the mean
    # degradation of a pulse optimized without noise.
    #
    reasons = violations(report, achieved, noise=False)

    extra = list(extras)
    if snr_power is not None:
        extra.append(("eps_noise", report.eps_noise))

    return SeedRun(seed=ctx.seed, best_objective=achieved, n_s=report.n_s,
                   kappa_s=report.kappa_s, d_w=ctx.d_w,
                   eps_info=report.eps_info, t_min=report.t_min,
                   t_qsl=t_qsl, evaluations=evaluations,
                   extras=tuple(extra), violations=tuple(reasons))


def _check_seeds(cfg: ExperimentConfig) -> None:
    if len(cfg.seeds) < MIN_SEEDS:
        raise ValueError(f"a sweep needs at least {MIN_SEEDS} seeds, "
                         f"not {len(cfg.seeds)}")


def _check_variable(cfg: ExperimentConfig, expected: SweepVariable) -> None:
    cfg.check_sweep()
    if cfg.sweep_variable != expected:
        raise ValueError(f"sweep variable is {cfg.sweep_variable.value}, "
                         f"not {expected.value}")

    _check_seeds(cfg)


def _as_count(value: float, label: str, minimum: int) -> int:
    if value != int(value) or value < minimum:
        raise ValueError(f"{label} must be an integer >= {minimum}, not {value}")

    return int(value)


def _assemble(cfg: ExperimentConfig, values: Sequence[float],
              horizons: Sequence[float], runs: list[SeedRun]) -> list["SweepRecord"]:
    """Group the runs, which are ordered by (value, seed)."""

    nseed = len(cfg.seeds)
    eps = cfg.fixed_parameters.epsilon
    return [SweepRecord(sweep_value=float(v), horizon=float(t), epsilon=eps,
                        runs=tuple(runs[i * nseed:(i + 1) * nseed]))
            for i, (v, t) in enumerate(zip(values, horizons))]


def _check_bounds(records: list[SweepRecord]) -> list[SweepRecord]:
    reasons = [f"value={rec.sweep_value:g} seed={run.seed}: {reason}"
               for rec in records for run in rec.runs
               for reason in run.violations]
    if reasons:
        raise BoundViolationError(f"{len(reasons)} bound violation(s): "
                                  f"{reasons[0]}", records, reasons)

    return records


def _sweep_dimension(cfg: ExperimentConfig) -> int:
    return system_dimension(build_system(cfg.system_preset), cfg.object_kind)


def _modes_task(ctx: _Context) -> SeedRun:
    nmodes = int(ctx.value)
    params = replace(ctx.params, n_modes=nmodes)
    problem, result, pulse = _optimize(ctx, params)
    return _seed_run(ctx, problem, pulse, result.objective, result.evaluations,
                     extras=[("n_params", parameter_count(nmodes))])


def sweep_parameter_count(cfg: ExperimentConfig,
                          workers: int | None = 1) -> list[SweepRecord]:
    """Vary the number of CRAB modes at fixed T.

    A value of 0 optimizes a constant pulse. Precision should
    improve sharply once the number of parameters, 2 n_modes,
    reaches the reachable-set dimension; see `knee_ratio`.

    Raises
    ------
    BoundViolationError

    """

    _check_variable(cfg, SweepVariable.N_MODES)
    values = [_as_count(v, "n_modes", 0) for v in cfg.sweep_values]
    dw = _sweep_dimension(cfg)
    tasks = [_Context(cfg, cfg.fixed_parameters, dw, v, s)
             for v in values for s in cfg.seeds]
    runs = parallel_map(_modes_task, tasks, workers)
    horizons = [cfg.fixed_parameters.T] * len(values)
    return _check_bounds(_assemble(cfg, values, horizons, runs))


def _time_task(ctx: _Context) -> SeedRun:
    params = replace(ctx.params, T=ctx.value)
    problem, result, pulse = _optimize(ctx, params)
    return _seed_run(ctx, problem, pulse, result.objective, result.evaluations)


def sweep_time(cfg: ExperimentConfig,
               workers: int | None = 1) -> list[SweepRecord]:
    """Vary the control time T at a fixed number of modes.

    No run with T below the speed-limit time may reach epsilon.

    Raises
    ------
    ValueError
        If a time is not positive.
    BoundViolationError

    """

    _check_variable(cfg, SweepVariable.T)
    values = list(cfg.sweep_values)
    for value in values:
        if not (math.isfinite(value) and value > 0):
            raise ValueError(f"T must be finite and positive, not {value}")

    dw = _sweep_dimension(cfg)
    tasks = [_Context(cfg, cfg.fixed_parameters, dw, v, s)
             for v in values for s in cfg.seeds]
    runs = parallel_map(_time_task, tasks, workers)
    return _check_bounds(_assemble(cfg, values, values, runs))


def _noise_task(ctx: _Context) -> list[SeedRun]:
    """Optimize a baseline pulse, then perturb it at every N/S value.

    ``ctx.value`` is unused; the values come from the configuration.
    The baseline is played back through the propagation grid so that
    N/S = 0 reproduces its objective exactly. The noise has one draw
    per pulse sample, held over that sample's integration steps, so it
    shares the pulse bandwidth. The same noise seeds are used at every
    N/S value, and the bounds are those of the optimized pulse.
    """

    params = ctx.params
    problem, result, pulse = _optimize(ctx, params)
    pcfg = propagation_config(params)
    samples, _ = control_samples(pulse, pcfg)
    gmin, gmax = pulse.window
    played = PropagationConfig(params.T, 1, pcfg.sampling)

    def run_with(signal: np.ndarray) -> float:
        sampled = SampledPulse(signal, params.T, gamma_min=gmin,
                               gamma_max=gmax, delta_gamma=pulse.delta_gamma)
        return objective(problem, sampled, played)

    baseline = run_with(samples)
    out = []
    for value in ctx.cfg.sweep_values:
        vctx = replace(ctx, value=value)
        extras = [("noise_to_signal", value), ("baseline", baseline)]
        if value == 0:
            out.append(_seed_run(vctx, problem, pulse, baseline,
                                 result.evaluations, extras=extras))
            continue

        snr = 1 / value
        noisy = [run_with(add_gaussian_noise(samples, snr,
                                             derive_seed(ctx.seed, j),
                                             hold=pcfg.segments_per_sample))
                 for j in range(params.noise_seeds)]
        out.append(_seed_run(vctx, problem, pulse, float(np.mean(noisy)),
                             params.noise_seeds, extras=extras,
                             snr_power=snr))

    return out


def sweep_noise(cfg: ExperimentConfig,
                workers: int | None = 1) -> list[SweepRecord]:
    """Perturb optimized pulses with white noise.

    The sweep values are noise to signal (power) ratios; 0 is the
    noiseless baseline. For each seed a baseline pulse is optimized,
    sampled on the propagation grid, and perturbed with
    ``noise_seeds`` independent noise realizations at each value.
    The recorded objective is the mean over the realizations.

    See Also
    --------
    fit_noise_slope

    """

    _check_variable(cfg, SweepVariable.SNR)
    values = list(cfg.sweep_values)
    if values[0] < 0:
        raise ValueError(f"noise to signal ratios must be >= 0, not {values[0]}")

    dw = _sweep_dimension(cfg)
    tasks = [_Context(cfg, cfg.fixed_parameters, dw, 0.0, s) for s in cfg.seeds]
    per_seed = parallel_map(_noise_task, tasks, workers)

    # Reorder from (seed, value) to (value, seed).
    #
    runs = [per_seed[j][i] for i in range(len(values))
            for j in range(len(cfg.seeds))]
    horizons = [cfg.fixed_parameters.T] * len(values)
    return _check_bounds(_assemble(cfg, values, horizons, runs))


def _size_task(ctx: _Context) -> SeedRun:
    """Bisect for the fewest modes that reach epsilon."""

    nsites = int(ctx.value)
    preset = ctx.cfg.system_preset.with_sites(nsites)
    cfg = replace(ctx.cfg, system_preset=preset)
    sctx = replace(ctx, cfg=cfg)

    attempts: dict[int, tuple[ControlProblem, OptimizationResult, Pulse]] = {}

    def attempt(nmodes: int) -> bool:
        if nmodes not in attempts:
            attempts[nmodes] = _optimize(sctx, replace(ctx.params, n_modes=nmodes))

        return attempts[nmodes][1].converged

    lo, hi = 1, ctx.params.max_modes
    found = attempt(hi)
    if found:
        while lo < hi:
            mid = (lo + hi) // 2
            if attempt(mid):
                hi = mid
            else:
                lo = mid + 1
    else:
        logger.warning("n=%d seed %d: epsilon not reached with %d modes",
                       nsites, ctx.seed, hi)

    problem, result, pulse = attempts[hi]
    total = sum(r.evaluations for _, r, _ in attempts.values())
    extras = [("n_modes_min", hi if found else None),
              ("hilbert_dim", 2 ** nsites)]
    return _seed_run(sctx, problem, pulse, result.objective, total, extras=extras)


def sweep_system_size(cfg: ExperimentConfig,
                      workers: int | None = 1) -> list[SweepRecord]:
    """Find the fewest CRAB modes that reach epsilon as the chain grows.

    The sweep values are the number of sites of the Ising chain. A
    seed that does not reach epsilon with ``max_modes`` modes is
    recorded with an empty ``n_modes_min``.
    """

    _check_variable(cfg, SweepVariable.N_QUBITS)
    if cfg.system_preset.name != PresetName.ISING_CHAIN:
        raise ValueError("the system-size sweep needs the ising-chain preset, "
                         f"not {cfg.system_preset.name.value}")

    values = [_as_count(v, "n_qubits", 2) for v in cfg.sweep_values]
    tasks = []
    for value in values:
        preset = cfg.system_preset.with_sites(value)
        dw = system_dimension(build_system(preset), cfg.object_kind)
        tasks.extend(_Context(cfg, cfg.fixed_parameters, dw, value, s)
                     for s in cfg.seeds)

    runs = parallel_map(_size_task, tasks, workers)
    horizons = [cfg.fixed_parameters.T] * len(values)
    return _check_bounds(_assemble(cfg, values, horizons, runs))


def run_sweep(cfg: ExperimentConfig,
              workers: int | None = 1) -> list[SweepRecord]:
    """Run the sweep named by the configuration."""

    cfg.check_sweep()
    sweeps = {SweepVariable.N_MODES: sweep_parameter_count,
              SweepVariable.T: sweep_time,
              SweepVariable.SNR: sweep_noise,
              SweepVariable.N_QUBITS: sweep_system_size}
    logger.info("Running the %s sweep over %d values and %d seeds",
                cfg.sweep_variable.value, len(cfg.sweep_values), len(cfg.seeds))
    return sweeps[cfg.sweep_variable](cfg, workers)


def knee_ratio(records: Sequence[SweepRecord], d_w: int) -> float:
    """How much better are runs with enough parameters?

    Parameters
    ----------
    records : sequence of SweepRecord
        From `sweep_parameter_count`.
    d_w : int

    Returns
    -------
    ratio : float
        The median objective over runs with 2 n_modes <= D/2 divided
        by the median over runs with 2 n_modes >= D (infinite when
        the latter is zero).

    """

    low = [obj for rec in records if 2 * rec.sweep_value <= d_w / 2
           for obj in rec.best_objectives]
    high = [obj for rec in records if 2 * rec.sweep_value >= d_w
            for obj in rec.best_objectives]
    if not low or not high:
        raise ValueError("the sweep needs values on both sides of the knee")

    below = float(np.median(high))
    above = float(np.median(low))
    return math.inf if below == 0 else above / below


def fit_noise_slope(records: Sequence[SweepRecord],
                    floor: float | None = None,
                    decades: float = 1.0) -> float:
    """The log-log slope of (objective - floor) against N/S.

    Parameters
    ----------
    records : sequence of SweepRecord
        From `sweep_noise`.
    floor : float or None, optional
        The noiseless objective; the default is the mean objective of
        the N/S = 0 record.
    decades : float, optional
        The fit uses N/S values up to 10^decades times the smallest
        non-zero value. Points whose mean objective is within a
        factor of 2 of the floor are excluded.

    Returns
    -------
    slope : float
        Close to 1 when the sensitivity is linear.

    """

    if floor is None:
        zero = [rec for rec in records if rec.sweep_value == 0]
        if not zero:
            raise ValueError("no N/S = 0 record to set the floor")

        floor = zero[0].mean_objective

    noisy = [rec for rec in records if rec.sweep_value > 0]
    if not noisy:
        raise ValueError("no records with noise")

    upper = noisy[0].sweep_value * 10 ** decades * (1 + 1e-9)
    xs = []
    ys = []
    for rec in noisy:
        if rec.sweep_value > upper or rec.mean_objective <= 2 * floor:
            continue

        xs.append(math.log10(rec.sweep_value))
        ys.append(math.log10(rec.mean_objective - floor))

    if len(xs) < 2:
        raise ValueError(f"only {len(xs)} point(s) in the fit window")

    slope, _ = np.polyfit(xs, ys, 1)
    logger.info("Noise slope %.3f from %d points", slope, len(xs))
    return float(slope)


def _format(value: Any) -> str:
    if value is None:
        return ""

    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()

    if isinstance(value, (int, np.integer)):
        return str(int(value))

    return repr(float(value))


def write_csv(records: Sequence[SweepRecord], path: str | Path) -> list[str]:
    """Write one row per (sweep value, seed).

    The columns are `CSV_COLUMNS`, then ``horizon`` and ``epsilon``,
    then any sweep-specific columns. Floats are written with repr so
    the file is exact and reproducible.

    Returns
    -------
    header : list of str

    """

    extras: list[str] = []
    for rec in records:
        for run in rec.runs:
            for name, _ in run.extras:
                if name not in extras:
                    extras.append(name)

    header = list(CSV_COLUMNS) + ["horizon", "epsilon"] + extras
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for rec in records:
            for run in rec.runs:
                named = dict(run.extras)
                row = [rec.sweep_value, run.seed, run.best_objective, run.n_s,
                       run.kappa_s, run.d_w, run.eps_info, run.t_min,
                       run.t_qsl, run.evaluations, rec.horizon, rec.epsilon]
                row += [named.get(name) for name in extras]
                writer.writerow([_format(v) for v in row])

    logger.info("Wrote %d records to %s", len(records), path)
    return header


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(path: str | Path, cfg: ExperimentConfig,
                   csv_path: str | Path | None = None,
                   summary: dict[str, Any] | None = None) -> dict[str, Any]:
    """Record how a sweep was run.

    The manifest has no timestamps, so repeated runs give identical
    files.
    """

    manifest: dict[str, Any] = {
        "config_sha256": config_hash(cfg),
        "config": cfg.to_dict(),
        "system": cfg.system_preset.label(),
        "seeds": list(cfg.seeds),
        "versions": {"qoc_bounds": __version__,
                     "numpy": np.__version__,
                     "scipy": scipy.__version__,
                     "python": platform.python_version()}}

    if csv_path is not None:
        csv_file = Path(csv_path)
        manifest["csv"] = {"name": csv_file.name, "sha256": _sha256(csv_file)}

    if summary:
        manifest["summary"] = summary

    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")
    return manifest


def _number(row: dict[str, str], key: str) -> float | None:
    text = row.get(key, "")
    return None if text in ("", None) else float(text)


def audit_csv(path: str | Path, floor: float = NUMERICAL_FLOOR) -> list[str]:
    """Re-check a sweep CSV against its bound columns.

    The information bound and the time limits are checked; the
    eps_noise column is informational, as in `violations`.

    Returns
    -------
    reasons : list of str
        One entry per violation; empty when the file is clean.

    """

    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.DictReader(fh), start=2):
            achieved = float(row["best_objective"])
            t_qsl = float(row["t_qsl"])
            label = f"line {lineno}"

            # A goal at zero distance needs no information.
            #
            if t_qsl == 0:
                continue

            eps_info = float(row["eps_info"])
            if achieved < eps_info - floor:
                out.append(f"{label}: objective {achieved:.6g} below "
                           f"eps_info {eps_info:.6g}")

            epsilon = _number(row, "epsilon")
            horizon = _number(row, "horizon")
            if epsilon is None or horizon is None or achieved > epsilon:
                continue

            if horizon < t_qsl:
                out.append(f"{label}: epsilon reached at T={horizon:g} < t_qsl")

            if horizon < float(row["t_min"]):
                out.append(f"{label}: epsilon reached at T={horizon:g} < t_min")

    return out

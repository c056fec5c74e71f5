#  SPDX-License-Identifier: GPL-3.0-or-later

"""Find control pulses with a seeded Nelder-Mead simplex search.

The control problem is to minimize the distance between the evolved
initial object and the goal,

- 1 - |<psi(T)|goal>|^2 for state vectors,
- the trace distance for density matrices,
- 1 - |Tr(U(T)^dagger V)|^2 / N^2 for propagators,

optionally plus a penalty on the mean power of the pulse. The search
is over the amplitudes of a CRAB basis (or the constant offset when
the basis has no modes), with several independent restarts, each of
which uses a fresh frequency jitter.

Results are deterministic: every random choice is seeded from the
optimizer seed, and restarts are merged in restart order.

"""

from dataclasses import dataclass, replace
import logging
import math
from typing import Any, Callable

import numpy as np

from .dynamics import PropagationConfig, control_samples, propagate
from .parallel import derive_seed, parallel_map, resolve_workers
from .pulse import ControlPulse, CrabBasis, Pulse, PulseTemplate, \
    parameter_count
from .qcore import DimensionError, HamiltonianPair, ObjectKind, \
    as_matrix, check_unitary, fidelity_pure, gate_infidelity, kind_of, \
    trace_distance


__all__ = ("OptimizationError", "ControlProblem", "OptimizationResult",
           "distance", "objective", "nelder_mead", "optimize",
           "best_pulse")


# The simplex coefficients: reflection, expansion, contraction, shrink.
#
ALPHA = 1.0
GAMMA = 2.0
RHO = 0.5
SIGMA = 0.5

logger = logging.getLogger(__name__)


class OptimizationError(RuntimeError):
    """The search can not continue.

    The ``point`` attribute is the parameter vector being evaluated.
    """

    def __init__(self, message: str, point: np.ndarray) -> None:
        super().__init__(message)
        self.point = point


class _BudgetExhausted(Exception):
    pass


class _TargetReached(Exception):
    pass


@dataclass(frozen=True, eq=False)
class ControlProblem:
    """Steer ``initial`` to within ``epsilon`` of ``goal`` in time T.

    Parameters
    ----------
    h : HamiltonianPair
    initial, goal
        Both `PureState`, both `DensityMatrix`, or both unitary
        matrices.
    horizon : float
        The time T.
    epsilon : float
        The target objective, in (0, 1).
    weights : tuple of float, optional
        The first weight multiplies the mean pulse power mean(gamma^2).

    See Also
    --------
    ControlProblem.for_unitary

    """

    h: HamiltonianPair
    initial: Any
    goal: Any
    horizon: float
    epsilon: float = 0.01
    weights: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        kinit = kind_of(self.initial)
        kgoal = kind_of(self.goal)
        if kinit != kgoal:
            raise TypeError(f"initial is {kinit.value} but goal is {kgoal.value}")

        if kinit == ObjectKind.UNITARY:
            for name in ["initial", "goal"]:
                mat = as_matrix(getattr(self, name), label=name)
                check_unitary(mat, label=name)
                mat.flags.writeable = False
                object.__setattr__(self, name, mat)

            dinit = self.initial.shape[0]
            dgoal = self.goal.shape[0]
        else:
            dinit = self.initial.dim
            dgoal = self.goal.dim

        if not dinit == dgoal == self.h.dim:
            raise DimensionError(f"dimensions differ: H is {self.h.dim}, "
                                 f"initial {dinit}, goal {dgoal}")

        if not (np.isfinite(self.horizon) and self.horizon > 0):
            raise ValueError(f"T must be finite and positive, not {self.horizon}")

        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must be in (0, 1), not {self.epsilon}")

        weights = tuple(float(w) for w in self.weights)
        if any(not (np.isfinite(w) and w >= 0) for w in weights):
            raise ValueError(f"weights must be finite and >= 0: {weights}")

        object.__setattr__(self, "weights", weights)

    @classmethod
    def for_unitary(cls, h: HamiltonianPair, goal, horizon: float,
                    epsilon: float = 0.01,
                    weights: tuple[float, ...] = ()) -> "ControlProblem":
        """Generate the unitary goal starting from the identity."""
        return cls(h, np.eye(h.dim, dtype=np.complex128), goal, horizon,
                   epsilon=epsilon, weights=weights)

    @property
    def kind(self) -> ObjectKind:
        return kind_of(self.goal)

    @property
    def penalty(self) -> float:
        return self.weights[0] if self.weights else 0.0


def distance(final, goal) -> float:
    """The objective's distance term between matching objects."""

    kind = kind_of(goal)
    if kind_of(final) != kind:
        raise TypeError(f"can not compare {kind_of(final).value} with {kind.value}")

    if kind == ObjectKind.PURE:
        return max(0.0, 1 - fidelity_pure(final, goal))

    if kind == ObjectKind.DENSITY:
        return trace_distance(final, goal)

    return gate_infidelity(final, goal)


def objective(problem: ControlProblem,
              pulse: Pulse,
              cfg: PropagationConfig
              ) -> float:
    """Evaluate the control functional for a pulse.

    Parameters
    ----------
    problem : ControlProblem
    pulse : Pulse
        Its duration must equal the problem horizon.
    cfg : PropagationConfig

    Returns
    -------
    value : float
        The distance of the final object from the goal plus the
        weighted pulse power, which is never negative.

    """

    if abs(pulse.duration - problem.horizon) > 1e-12 * max(1.0, problem.horizon):
        raise ValueError(f"pulse duration {pulse.duration} does not match "
                         f"the problem horizon {problem.horizon}")

    final = propagate(problem.h, problem.initial, pulse, cfg)
    value = distance(final, problem.goal)
    if problem.penalty > 0:
        gammas, _ = control_samples(pulse, cfg)
        value += problem.penalty * float(np.mean(gammas ** 2))

    return value


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    """The outcome of a search."""

    coefficients: np.ndarray
    objective: float
    evaluations: int
    converged: bool
    history: tuple[tuple[int, float], ...]
    """(evaluation index, objective) for each improvement."""

    seed: int
    basis_seed: int | None = None
    restart: int = 0
    message: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {"coefficients": [float(c) for c in self.coefficients],
                "objective": self.objective,
                "evaluations": self.evaluations,
                "converged": self.converged,
                "history": [[i, v] for i, v in self.history],
                "seed": self.seed,
                "basis_seed": self.basis_seed,
                "restart": self.restart,
                "message": self.message}


class _Counter:
    """Count evaluations, track the best point, enforce the budget."""

    def __init__(self, func: Callable[[np.ndarray], float], budget: int,
                 target: float | None = None) -> None:
        self.func = func
        self.budget = budget
        self.target = target
        self.nfev = 0
        self.best_x: np.ndarray | None = None
        self.best_f = math.inf
        self.history: list[tuple[int, float]] = []

    def __call__(self, x: np.ndarray) -> float:
        if self.nfev >= self.budget:
            raise _BudgetExhausted()

        self.nfev += 1
        value = float(self.func(x))
        if not math.isfinite(value):
            raise OptimizationError(f"objective is {value} at evaluation "
                                    f"{self.nfev}", point=x.copy())

        if value < self.best_f:
            self.best_f = value
            self.best_x = x.copy()
            self.history.append((self.nfev, value))

        if self.target is not None and value <= self.target:
            raise _TargetReached()

        return value


def nelder_mead(f: Callable[[np.ndarray], float],
                x0,
                scale: float = 0.1,
                budget: int | None = None,
                ftol: float = 1e-12,
                seed: int = 0,
                ftarget: float | None = None
                ) -> OptimizationResult:
    """Minimize a function with the Nelder-Mead simplex method.

    Parameters
    ----------
    f : callable
        The function to minimize; it is called with a 1D array.
    x0 : array_like
        The starting point, with d >= 1 elements.
    scale : float, optional
        The size of the initial simplex: vertex i is x0 displaced by
        scale (1 + u_i) along axis i, where u_i is a seeded jitter in
        [-0.1, 0.1).
    budget : int or None, optional
        The maximum number of evaluations, at least d + 1. The default
        is 1024 d.
    ftol : float, optional
        Stop when the spread of the values at the vertices is less
        than this.
    seed : int, optional
        Seeds the simplex jitter.
    ftarget : float or None, optional
        Stop as soon as a value at or below this is found.

    Returns
    -------
    result : OptimizationResult
        ``converged`` records whether a stopping criterion other than
        the budget was met.

    Raises
    ------
    OptimizationError
        When f returns a non-finite value.

    Notes
    -----
    The iteration uses the standard coefficients (reflection 1,
    expansion 2, contraction 0.5, shrink 0.5) with greedy expansion,
    and inside and outside contractions. Vertices are ordered by
    (value, creation order) so ties are broken deterministically.

    Examples
    --------

    >>> res = nelder_mead(lambda x: (x[0] - 1)**2 + (x[1] - 2)**2, [0, 0])
    >>> np.allclose(res.coefficients, [1, 2], atol=1e-5)
    True

    """

    xstart = np.array(x0, dtype=float).reshape(-1)
    ndim = xstart.size
    if ndim < 1:
        raise ValueError("x0 must have at least one element")

    nfev = 1024 * ndim if budget is None else budget
    if nfev < ndim + 1:
        raise ValueError(f"budget={nfev} is less than d + 1 = {ndim + 1}")

    if not scale > 0:
        raise ValueError(f"scale must be positive, not {scale}")

    rng = np.random.default_rng(seed)
    jitter = 1 + 0.1 * rng.uniform(-1, 1, size=ndim)
    counter = _Counter(f, nfev, ftarget)

    # Each vertex is (value, creation index, point).
    #
    vertices: list[tuple[float, int, np.ndarray]] = []
    created = 0

    def add(x: np.ndarray) -> tuple[float, int, np.ndarray]:
        nonlocal created
        vertex = (counter(x), created, x)
        created += 1
        return vertex

    converged = False
    message = "evaluation budget exhausted"
    try:
        vertices.append(add(xstart))
        for i in range(ndim):
            x = xstart.copy()
            x[i] += scale * jitter[i]
            vertices.append(add(x))

        while True:
            vertices.sort(key=lambda v: (v[0], v[1]))
            if vertices[-1][0] - vertices[0][0] < ftol:
                converged = True
                message = "simplex values converged"
                break

            fbest = vertices[0][0]
            fsecond = vertices[-2][0]
            fworst, _, xworst = vertices[-1]
            centroid = np.mean([v[2] for v in vertices[:-1]], axis=0)

            reflected = add(centroid + ALPHA * (centroid - xworst))
            if fbest <= reflected[0] < fsecond:
                vertices[-1] = reflected
                continue

            if reflected[0] < fbest:
                expanded = add(centroid + GAMMA * (reflected[2] - centroid))
                vertices[-1] = expanded if expanded[0] < reflected[0] else reflected
                continue

            if reflected[0] < fworst:
                outside = add(centroid + RHO * (reflected[2] - centroid))
                if outside[0] <= reflected[0]:
                    vertices[-1] = outside
                    continue
            else:
                inside = add(centroid + RHO * (xworst - centroid))
                if inside[0] < fworst:
                    vertices[-1] = inside
                    continue

            xbest = vertices[0][2]
            for i in range(1, len(vertices)):
                vertices[i] = add(xbest + SIGMA * (vertices[i][2] - xbest))

    except _BudgetExhausted:
        pass

    except _TargetReached:
        converged = True
        message = "target reached"

    if counter.best_x is None:
        raise OptimizationError("no evaluations were made", point=xstart)

    logger.debug("Nelder-Mead: %s after %d evaluations, f=%g",
                 message, counter.nfev, counter.best_f)
    return OptimizationResult(coefficients=counter.best_x,
                              objective=counter.best_f,
                              evaluations=counter.nfev,
                              converged=converged,
                              history=tuple(counter.history),
                              seed=seed, message=message)


@dataclass(frozen=True, eq=False)
class _Restart:
    problem: ControlProblem
    basis: CrabBasis
    template: PulseTemplate
    cfg: PropagationConfig
    x0: np.ndarray
    scale: float
    budget: int
    ftol: float
    seed: int
    index: int


def _run_restart(task: _Restart) -> OptimizationResult:
    """Run one restart (module level so it can be sent to a worker)."""

    def func(x: np.ndarray) -> float:
        try:
            pulse = task.template.build(task.basis, x)
            return objective(task.problem, pulse, task.cfg)
        except (ValueError, np.linalg.LinAlgError) as exc:
            raise OptimizationError(f"unable to evaluate the pulse: {exc}",
                                    point=x.copy()) from exc

    result = nelder_mead(func, task.x0, scale=task.scale, budget=task.budget,
                         ftol=task.ftol, seed=task.seed,
                         ftarget=task.problem.epsilon)
    logger.info("Restart %d (basis seed %d): objective %.3e after %d evaluations",
                task.index, task.basis.seed, result.objective, result.evaluations)
    return replace(result, basis_seed=task.basis.seed, restart=task.index)


def _start_point(basis: CrabBasis, template: PulseTemplate,
                 rng: np.random.Generator | None) -> np.ndarray:
    """Zero amplitudes (or the template offset), or a random point."""

    nparams = parameter_count(basis.n_modes)
    if rng is None:
        if basis.n_modes == 0:
            return np.asarray([template.gamma0])

        return np.zeros(nparams)

    if basis.n_modes == 0:
        return rng.uniform(template.gamma_min, template.gamma_max, size=1)

    # Keep the random amplitudes within the window.
    #
    spread = template.width / (2 * nparams)
    return rng.uniform(-spread, spread, size=nparams)


def optimize(problem: ControlProblem,
             basis: CrabBasis,
             restarts: int = 3,
             budget: int = 2000,
             seed: int = 0,
             *,
             template: PulseTemplate | None = None,
             cfg: PropagationConfig | None = None,
             scale: float | None = None,
             ftol: float = 1e-12,
             workers: int | None = 1
             ) -> OptimizationResult:
    """Search for the pulse that best reaches the goal.

    Parameters
    ----------
    problem : ControlProblem
    basis : CrabBasis
        The basis used by the first restart. Its horizon must equal
        the problem horizon.
    restarts : int, optional
        The first restart starts from zero amplitudes; the others use
        a new frequency jitter and a random starting point.
    budget : int, optional
        The maximum number of evaluations per restart.
    seed : int, optional
        All random choices are derived from this.
    template : PulseTemplate or None, optional
        The offset, amplitude window and quantization step.
    cfg : PropagationConfig or None, optional
        The default uses the problem horizon.
    scale : float or None, optional
        The initial simplex size; the default is a tenth of the
        amplitude window.
    ftol : float, optional
    workers : int or None, optional
        The restarts are independent and can be run in parallel.

    Returns
    -------
    result : OptimizationResult
        The best restart, with ties going to the earliest, with
        ``evaluations`` summed over the restarts used and ``converged``
        set when the objective is at most epsilon. Each restart stops
        once it reaches epsilon, and no restart after the first to
        reach it is used (or, when run serially, started).

    See Also
    --------
    best_pulse

    """

    if abs(basis.horizon - problem.horizon) > 1e-12 * max(1.0, problem.horizon):
        raise ValueError(f"basis horizon {basis.horizon} does not match "
                         f"the problem horizon {problem.horizon}")

    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, not {restarts}")

    tmpl = PulseTemplate() if template is None else template
    pcfg = PropagationConfig(problem.horizon) if cfg is None else cfg
    step = 0.1 * tmpl.width if scale is None else scale

    tasks = []
    for idx in range(restarts):
        if idx == 0:
            rbasis = basis
            x0 = _start_point(basis, tmpl, None)
        else:
            rbasis = basis.with_seed(derive_seed(basis.seed, seed, idx))
            rng = np.random.default_rng(derive_seed(seed, idx, 1))
            x0 = _start_point(rbasis, tmpl, rng)

        tasks.append(_Restart(problem=problem, basis=rbasis, template=tmpl,
                              cfg=pcfg, x0=x0, scale=step, budget=budget,
                              ftol=ftol, seed=derive_seed(seed, idx),
                              index=idx))

    if resolve_workers(workers) == 1:
        results = []
        for task in tasks:
            results.append(_run_restart(task))
            if results[-1].objective <= problem.epsilon:
                break
    else:
        results = parallel_map(_run_restart, tasks, workers)

    # Keep the restarts up to the first that reached epsilon so the
    # result does not depend on the number of workers.
    #
    hit = next((i for i, r in enumerate(results)
                if r.objective <= problem.epsilon), len(results) - 1)
    results = results[:hit + 1]
    best = min(results, key=lambda r: (r.objective, r.restart))
    total = sum(r.evaluations for r in results)
    converged = best.objective <= problem.epsilon
    if not converged:
        logger.warning("Best objective %.3e is above epsilon=%g after %d restarts",
                       best.objective, problem.epsilon, restarts)

    return replace(best, evaluations=total, converged=converged, seed=seed)


def best_pulse(result: OptimizationResult,
               basis: CrabBasis,
               template: PulseTemplate | None = None
               ) -> ControlPulse:
    """Rebuild the pulse found by `optimize`.

    The basis is the one passed to `optimize`; the frequency jitter
    of the winning restart is restored from the result.
    """

    tmpl = PulseTemplate() if template is None else template
    seed = basis.seed if result.basis_seed is None else result.basis_seed
    return tmpl.build(basis.with_seed(seed), result.coefficients)

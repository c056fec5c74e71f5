#  SPDX-License-Identifier: GPL-3.0-or-later

"""Piecewise-constant propagation under H(t) = H_D + gamma(t) H_C.

The interval [0, T] is split into ``n_samples * segments_per_sample``
equal steps of length dt, the control is read once per step (at the
start or the middle of the step), and each step is integrated exactly
with exp(-i dt H_k). The step propagators are multiplied right to
left in time, so that U(T) = P_{n-1} ... P_1 P_0.

Only closed (coherent) evolution is supported: the Hamiltonians are
validated as Hermitian when the `HamiltonianPair` is created.

"""

from dataclasses import dataclass
from enum import Enum
import logging
from typing import Iterator

import numpy as np

from .pulse import Pulse
from .qcore import DensityMatrix, DimensionError, HamiltonianPair, \
    PureState, as_matrix, dagger


__all__ = ("SamplingRule", "PropagationConfig", "MAX_SEGMENTS",
           "time_grid", "control_samples", "step_propagators",
           "propagate_unitary", "propagate_pure", "propagate_density",
           "propagate")


MAX_SEGMENTS = 10 ** 6

# The number of step propagators held in memory at once.
#
CHUNK_SIZE = 1024

logger = logging.getLogger(__name__)


class SamplingRule(Enum):
    """Where in each step the control is read."""

    LEFT = "left"
    MIDPOINT = "midpoint"

    @classmethod
    def from_name(cls, name: "str | SamplingRule") -> "SamplingRule":
        """Case-insensitive lookup."""

        if isinstance(name, cls):
            return name

        check = str(name).casefold()
        out = next((s for s in cls if s.value == check), None)
        if out is None:
            raise ValueError(f"Unrecognized sampling rule '{name}'")

        return out


@dataclass(frozen=True)
class PropagationConfig:
    """How to integrate the dynamics.

    Parameters
    ----------
    total_time : float
        The duration T, which must match the pulse.
    segments_per_sample : int, optional
        The number of integration steps per pulse sample.
    sampling : SamplingRule or str, optional
        The midpoint rule is second-order accurate in dt, the
        left-point rule first order.

    """

    total_time: float
    segments_per_sample: int = 8
    sampling: SamplingRule = SamplingRule.MIDPOINT

    def __post_init__(self) -> None:
        if not (np.isfinite(self.total_time) and self.total_time > 0):
            raise ValueError(f"T must be finite and positive, not {self.total_time}")

        if not 1 <= self.segments_per_sample <= MAX_SEGMENTS:
            raise ValueError("segments_per_sample must be in [1, "
                             f"{MAX_SEGMENTS}], not {self.segments_per_sample}")

        object.__setattr__(self, "sampling", SamplingRule.from_name(self.sampling))


def time_grid(pulse: Pulse, cfg: PropagationConfig) -> tuple[np.ndarray, float]:
    """The times at which the control is read, and the step length.

    Raises
    ------
    ValueError
        When the pulse duration does not match the configuration.

    """

    if abs(pulse.duration - cfg.total_time) > 1e-12 * max(1.0, cfg.total_time):
        raise ValueError(f"pulse is defined on [0, {pulse.duration}] but "
                         f"the propagation time is {cfg.total_time}")

    nsteps = pulse.n_samples * cfg.segments_per_sample
    dt = cfg.total_time / nsteps
    offset = 0.5 if cfg.sampling == SamplingRule.MIDPOINT else 0.0
    return (np.arange(nsteps) + offset) * dt, dt


def control_samples(pulse: Pulse, cfg: PropagationConfig) -> tuple[np.ndarray, float]:
    """The control value for each step, and the step length."""

    times, dt = time_grid(pulse, cfg)
    return pulse.sample(times), dt


def step_propagators(h: HamiltonianPair,
                     gammas: np.ndarray,
                     dt: float
                     ) -> Iterator[np.ndarray]:
    """Yield stacks of exp(-i dt (H_D + gamma_k H_C)) in time order.

    The Hermitian generators are diagonalized in batches.
    """

    for start in range(0, gammas.size, CHUNK_SIZE):
        chunk = gammas[start:start + CHUNK_SIZE]
        hs = h.drift[None, :, :] + chunk[:, None, None] * h.control[None, :, :]
        evals, evecs = np.linalg.eigh(hs)
        phases = np.exp(-1j * dt * evals)
        yield (evecs * phases[:, None, :]) @ dagger(evecs)


def _check_dim(h: HamiltonianPair, dim: int) -> None:
    if h.dim != dim:
        raise DimensionError(f"the Hamiltonian has dimension {h.dim} but "
                             f"the initial object has dimension {dim}")


def propagate_unitary(h: HamiltonianPair,
                      pulse: Pulse,
                      cfg: PropagationConfig
                      ) -> np.ndarray:
    """Return U(T) for the pulse.

    Parameters
    ----------
    h : HamiltonianPair
    pulse : Pulse
        Its duration must equal ``cfg.total_time``.
    cfg : PropagationConfig

    Returns
    -------
    u : ndarray
        The propagator, ordered right to left in time.

    See Also
    --------
    propagate_pure, propagate_density

    """

    gammas, dt = control_samples(pulse, cfg)
    logger.debug("Propagating N=%d over %d steps of dt=%g", h.dim, gammas.size, dt)

    u = np.eye(h.dim, dtype=np.complex128)
    for stack in step_propagators(h, gammas, dt):
        for step in stack:
            u = step @ u

    return u


def propagate_pure(h: HamiltonianPair,
                   psi0: PureState,
                   pulse: Pulse,
                   cfg: PropagationConfig
                   ) -> PureState:
    """Evolve a state vector."""

    _check_dim(h, psi0.dim)
    gammas, dt = control_samples(pulse, cfg)

    psi = psi0.amplitudes.copy()
    for stack in step_propagators(h, gammas, dt):
        for step in stack:
            psi = step @ psi

    return PureState.from_vector(psi)


def propagate_density(h: HamiltonianPair,
                      rho0: DensityMatrix,
                      pulse: Pulse,
                      cfg: PropagationConfig
                      ) -> DensityMatrix:
    """Return U rho0 U^dagger."""

    _check_dim(h, rho0.dim)
    u = propagate_unitary(h, pulse, cfg)
    rho = u @ rho0.matrix @ dagger(u)
    return DensityMatrix((rho + dagger(rho)) / 2)


def propagate(h: HamiltonianPair, initial, pulse: Pulse, cfg: PropagationConfig):
    """Evolve a state vector, density matrix, or propagator.

    A matrix that is neither a `PureState` nor a `DensityMatrix` is
    treated as an initial propagator U0, and U(T) U0 is returned.
    """

    if isinstance(initial, PureState):
        return propagate_pure(h, initial, pulse, cfg)

    if isinstance(initial, DensityMatrix):
        return propagate_density(h, initial, pulse, cfg)

    u0 = as_matrix(initial, label="U0")
    _check_dim(h, u0.shape[0])
    return propagate_unitary(h, pulse, cfg) @ u0

#  SPDX-License-Identifier: GPL-3.0-or-later

"""The model systems and their initial and goal objects."""

import functools
import logging

import numpy as np

from .config import GoalKind, PresetName, SystemPreset
from .qcore import HamiltonianPair, ObjectKind, PureState, \
    embed, haar_state, haar_unitary, pauli, random_hermitian


__all__ = ("ising_chain", "build_system", "subsystem_dims",
           "initial_object", "goal_object")


logger = logging.getLogger(__name__)


def ising_chain(n: int, J: float = 1.0, h: float = 1.0, g: float = 0.5,
                control: str = "z") -> HamiltonianPair:
    """An open Ising chain driven at its first site.

    Parameters
    ----------
    n : int
        The number of sites (at least 2).
    J, h, g : float, optional
        H_D = J sum Z_i Z_{i+1} + h sum X_i + g sum Z_i.
    control : {"z", "x"}, optional
        H_C is Z or X on the first site.

    Returns
    -------
    pair : HamiltonianPair
        Each operator is scaled to unit operator norm.

    Notes
    -----
    With g = 0 the chain maps onto free fermions. Driving the first
    site with X then only generates so(2n), and driving it with Z
    only so(2n + 1), so the longitudinal field is needed for full
    control.

    """

    if n < 2:
        raise ValueError(f"the Ising chain needs at least 2 sites, not {n}")

    sz = pauli("Z")
    sx = pauli("X")
    zz = [embed(sz, i, n) @ embed(sz, i + 1, n) for i in range(n - 1)]
    drift = (J * sum(zz) +
             h * sum(embed(sx, i, n) for i in range(n)) +
             g * sum(embed(sz, i, n) for i in range(n)))

    op = {"z": sz, "x": sx}.get(control.casefold())
    if op is None:
        raise ValueError(f"Unrecognized Ising control '{control}'")

    return HamiltonianPair(drift, embed(op, 0, n)).normalized()


@functools.lru_cache(maxsize=32)
def build_system(preset: SystemPreset) -> HamiltonianPair:
    """The Hamiltonians of a preset."""

    if preset.name == PresetName.SINGLE_QUBIT:
        return HamiltonianPair(pauli("Z"), pauli("X"))

    if preset.name == PresetName.ISING_CHAIN:
        return ising_chain(preset.n, J=preset.J, h=preset.h, g=preset.g,
                           control=preset.control)

    rng = np.random.default_rng(preset.seed)
    return HamiltonianPair(random_hermitian(preset.N, rng),
                           random_hermitian(preset.N, rng)).normalized()


def subsystem_dims(preset: SystemPreset) -> list[int]:
    """The local dimensions, for entropy diagnostics."""

    if preset.name == PresetName.ISING_CHAIN:
        return [2] * preset.n

    if preset.name == PresetName.SINGLE_QUBIT:
        return [2]

    return [preset.N]


def initial_object(kind: ObjectKind, dim: int):
    """|0>, |0><0|, or the identity."""

    if kind == ObjectKind.PURE:
        return PureState.basis(dim, 0)

    if kind == ObjectKind.DENSITY:
        return PureState.basis(dim, 0).projector()

    return np.eye(dim, dtype=np.complex128)


def _shift(dim: int) -> np.ndarray:
    """The cyclic shift |k> -> |k + 1>, which is sigma_x for a qubit."""
    return np.roll(np.eye(dim, dtype=np.complex128), 1, axis=0)


def goal_object(kind: ObjectKind, dim: int, goal: GoalKind, seed: int = 0):
    """The goal for a run.

    Parameters
    ----------
    kind : ObjectKind
    dim : int
    goal : GoalKind
        ORTHOGONAL is the last basis state (or the cyclic shift for
        propagators), HAAR is drawn from the Haar measure using the
        seed, and INITIAL is the initial object.
    seed : int, optional

    """

    if goal == GoalKind.INITIAL:
        return initial_object(kind, dim)

    if goal == GoalKind.ORTHOGONAL:
        if kind == ObjectKind.UNITARY:
            return _shift(dim)

        state = PureState.basis(dim, dim - 1)
    else:
        rng = np.random.default_rng(seed)
        if kind == ObjectKind.UNITARY:
            return haar_unitary(dim, rng)

        state = haar_state(dim, rng)

    if kind == ObjectKind.DENSITY:
        return state.projector()

    return state

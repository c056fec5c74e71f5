#  SPDX-License-Identifier: GPL-3.0-or-later

"""Experiment configuration.

A configuration is a JSON document whose keys match the fields of
`ExperimentConfig`::

    {"system_preset": {"name": "single-qubit"},
     "object_kind": "pure",
     "sweep_variable": "n_modes",
     "sweep_values": [0, 1, 2, 4],
     "fixed_parameters": {"T": 4.0, "epsilon": 1e-6},
     "seeds": [1, 2, 3],
     "budget": 4000,
     "output_path": "out/n_modes"}

Only ``system_preset`` and ``object_kind`` are required; the sweep
fields are only needed by the ``sweep`` command. Names are matched
case-insensitively.

"""

from dataclasses import asdict, dataclass, field, fields
from enum import Enum
import hashlib
import json
import logging
import math
from pathlib import Path
from typing import Any

from .dynamics import MAX_SEGMENTS, SamplingRule
from .pulse import Envelope
from .qcore import ObjectKind


__all__ = ("PresetName", "SweepVariable", "GoalKind", "SystemPreset",
           "RunParameters", "ExperimentConfig", "load_config",
           "config_hash", "MAX_CHAIN_QUBITS")


MAX_CHAIN_QUBITS = 10

logger = logging.getLogger(__name__)


def _lookup(cls, name, label):
    if isinstance(name, cls):
        return name

    check = str(name).casefold()
    out = next((e for e in cls if e.value.casefold() == check), None)
    if out is None:
        choices = ", ".join(e.value for e in cls)
        raise ValueError(f"Unrecognized {label} '{name}': expected one of {choices}")

    return out


class PresetName(Enum):
    """The model systems."""

    SINGLE_QUBIT = "single-qubit"
    """H_D = sigma_z, H_C = sigma_x."""

    ISING_CHAIN = "ising-chain"
    """An open Ising chain controlled at its first site."""

    RANDOM_PAIR = "random-pair"
    """A random Hermitian drift and control."""


class SweepVariable(Enum):
    """The quantity varied by a sweep."""

    N_MODES = "n_modes"
    T = "T"
    SNR = "snr"
    """The noise to signal ratio N/S (0 is noiseless)."""

    N_QUBITS = "n_qubits"


class GoalKind(Enum):
    """How the goal is chosen."""

    ORTHOGONAL = "orthogonal"
    HAAR = "haar"
    INITIAL = "initial"


@dataclass(frozen=True)
class SystemPreset:
    """The model system.

    Parameters
    ----------
    name : PresetName or str
    n : int, optional
        The number of Ising sites, 2 to `MAX_CHAIN_QUBITS`.
    J, h, g : float, optional
        The Ising coupling, transverse field and longitudinal field.
    control : str, optional
        The Pauli operator on the first Ising site that couples to
        the control field: "z" or "x".
    N : int, optional
        The dimension of the random pair.
    seed : int, optional
        Seeds the random pair.

    """

    name: PresetName
    n: int = 2
    J: float = 1.0
    h: float = 1.0
    g: float = 0.5
    control: str = "z"
    N: int = 2
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "name", _lookup(PresetName, self.name, "preset"))
        object.__setattr__(self, "control", str(self.control).casefold())
        if self.name == PresetName.ISING_CHAIN:
            if not 2 <= self.n <= MAX_CHAIN_QUBITS:
                raise ValueError(f"the Ising chain needs 2 to {MAX_CHAIN_QUBITS} "
                                 f"sites, not n={self.n}")

            if self.control not in ("x", "z"):
                raise ValueError(f"Unrecognized Ising control '{self.control}'")

        if self.name == PresetName.RANDOM_PAIR and self.N < 2:
            raise ValueError(f"the random pair needs N >= 2, not N={self.N}")

    @classmethod
    def from_dict(cls, data: dict[str, Any] | str) -> "SystemPreset":
        if isinstance(data, str):
            return cls(data)

        return cls(**_known_keys(cls, data, "system_preset"))

    def with_sites(self, n: int) -> "SystemPreset":
        """The same preset with a different chain length."""
        return SystemPreset(self.name, n=n, J=self.J, h=self.h, g=self.g,
                            control=self.control, N=self.N, seed=self.seed)

    def label(self) -> str:
        """A description for reports."""

        if self.name == PresetName.ISING_CHAIN:
            return (f"ising-chain n={self.n} J={self.J} h={self.h} g={self.g} "
                    f"control={self.control} (model system chosen by qoc_bounds)")

        if self.name == PresetName.RANDOM_PAIR:
            return f"random-pair N={self.N} seed={self.seed}"

        return self.name.value

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["name"] = self.name.value
        return out


def _known_keys(cls, data: dict[str, Any], label: str) -> dict[str, Any]:
    names = {f.name for f in fields(cls) if f.init}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ValueError(f"Unrecognized {label} keys: {', '.join(unknown)}")

    return dict(data)


@dataclass(frozen=True)
class RunParameters:
    """The settings held fixed during a sweep.

    The JSON keys are the field names.
    """

    T: float = 4.0
    n_modes: int = 4
    restarts: int = 3
    epsilon: float = 0.01
    gamma0: float = 0.0
    gamma_min: float = -1.0
    gamma_max: float = 1.0
    delta_gamma: float | None = None
    envelope: Envelope = Envelope.NONE
    segments_per_sample: int = 8
    sampling: SamplingRule = SamplingRule.MIDPOINT
    goal: GoalKind = GoalKind.ORTHOGONAL
    goal_seed: int = 0
    basis_seed: int | None = None
    noise_seeds: int = 20
    fit_decades: float = 1.0
    max_modes: int = 8
    penalty: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "envelope", Envelope.from_name(self.envelope))
        object.__setattr__(self, "sampling", SamplingRule.from_name(self.sampling))
        object.__setattr__(self, "goal", _lookup(GoalKind, self.goal, "goal"))

        if not (math.isfinite(self.T) and self.T > 0):
            raise ValueError(f"T must be finite and positive, not {self.T}")

        if self.n_modes < 0:
            raise ValueError(f"n_modes must be >= 0, not {self.n_modes}")

        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, not {self.restarts}")

        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must be in (0, 1), not {self.epsilon}")

        if not 1 <= self.segments_per_sample <= MAX_SEGMENTS:
            raise ValueError("segments_per_sample must be in [1, "
                             f"{MAX_SEGMENTS}], not {self.segments_per_sample}")

        if self.noise_seeds < 1:
            raise ValueError(f"noise_seeds must be >= 1, not {self.noise_seeds}")

        if not self.fit_decades > 0:
            raise ValueError(f"fit_decades must be positive, not {self.fit_decades}")

        if self.max_modes < 1:
            raise ValueError(f"max_modes must be >= 1, not {self.max_modes}")

        if self.penalty < 0:
            raise ValueError(f"penalty must be >= 0, not {self.penalty}")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunParameters":
        return cls(**_known_keys(cls, data, "fixed_parameters"))

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        for key in ["envelope", "sampling", "goal"]:
            out[key] = out[key].value

        return out


@dataclass(frozen=True)
class ExperimentConfig:
    """An experiment: the system, what is steered, and the sweep."""

    system_preset: SystemPreset
    object_kind: ObjectKind
    sweep_variable: SweepVariable | None = None
    sweep_values: tuple[float, ...] = ()
    fixed_parameters: RunParameters = field(default_factory=RunParameters)
    seeds: tuple[int, ...] = (0,)
    budget: int = 2000
    output_path: str | None = None

    def __post_init__(self) -> None:
        preset = self.system_preset
        if not isinstance(preset, SystemPreset):
            preset = SystemPreset.from_dict(preset)

        params = self.fixed_parameters
        if not isinstance(params, RunParameters):
            params = RunParameters.from_dict(params)

        object.__setattr__(self, "system_preset", preset)
        object.__setattr__(self, "fixed_parameters", params)
        object.__setattr__(self, "object_kind", ObjectKind.from_name(self.object_kind))
        if self.sweep_variable is not None:
            object.__setattr__(self, "sweep_variable",
                               _lookup(SweepVariable, self.sweep_variable,
                                       "sweep variable"))

        values = tuple(float(v) for v in self.sweep_values)
        if any(b <= a for a, b in zip(values[:-1], values[1:])):
            raise ValueError(f"sweep_values must be strictly increasing: {list(values)}")

        seeds = tuple(int(s) for s in self.seeds)
        if len(seeds) == 0:
            raise ValueError("at least one seed is needed")

        if len(set(seeds)) != len(seeds) or any(s < 0 for s in seeds):
            raise ValueError(f"seeds must be distinct and non-negative: {list(seeds)}")

        if self.budget < 2:
            raise ValueError(f"budget must be >= 2, not {self.budget}")

        object.__setattr__(self, "sweep_values", values)
        object.__setattr__(self, "seeds", seeds)

    def check_sweep(self) -> None:
        """Ensure the sweep fields are set."""

        if self.sweep_variable is None:
            raise ValueError("the configuration has no sweep_variable")

        if len(self.sweep_values) == 0:
            raise ValueError("sweep_values can not be empty")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        """Create the configuration from parsed JSON."""

        args = _known_keys(cls, data, "configuration")
        for key in ["system_preset", "object_kind"]:
            if key not in args:
                raise ValueError(f"the configuration is missing '{key}'")

        return cls(**args)

    def to_dict(self) -> dict[str, Any]:
        return {"system_preset": self.system_preset.to_dict(),
                "object_kind": self.object_kind.value,
                "sweep_variable": None if self.sweep_variable is None else self.sweep_variable.value,
                "sweep_values": list(self.sweep_values),
                "fixed_parameters": self.fixed_parameters.to_dict(),
                "seeds": list(self.seeds),
                "budget": self.budget,
                "output_path": self.output_path}


def load_config(path: str | Path) -> ExperimentConfig:
    """Read a JSON configuration file.

    Raises
    ------
    ValueError
        When the file is not valid JSON or the contents are invalid.

    """

    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from None

    if not isinstance(data, dict):
        raise ValueError(f"{path} must contain a JSON object")

    cfg = ExperimentConfig.from_dict(data)
    logger.info("Read configuration from %s", path)
    return cfg


def config_hash(cfg: ExperimentConfig) -> str:
    """The SHA-256 of the canonical JSON form of the configuration."""

    text = json.dumps(cfg.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()

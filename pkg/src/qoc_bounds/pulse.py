#  SPDX-License-Identifier: GPL-3.0-or-later

"""Band-limited, amplitude-bounded control pulses.

A `ControlPulse` is a constant baseline plus a chopped randomized
trigonometric expansion,

    gamma(t) = clamp(gamma0 + env(t) sum_k [a_k sin(w_k t) + b_k cos(w_k t)])

where the frequencies w_k = 2 pi k (1 + r_k) / T are fixed by the
seed of the `CrabBasis` and the clamp keeps the field inside the
amplitude window. A `SampledPulse` is a piecewise-constant signal
given by uniformly spaced samples, and is used for quantized and
noisy signals.

The information content of a pulse follows Hartley's counting: a
signal with bandwidth B (cycles per unit time) lasting T carries
n_s = T B samples, each of which can take one of
1 + (gamma_max - gamma_min) / delta_gamma distinguishable values.

"""

from dataclasses import dataclass, field
from enum import Enum
import csv
import logging
import math
from pathlib import Path
from typing import Any, Protocol, runtime_checkable

import numpy as np


__all__ = ("Envelope", "Pulse", "CrabBasis", "ControlPulse",
           "SampledPulse", "TimeReversed", "PulseTemplate",
           "PulseInfoReport", "DEFAULT_BIT_DEPTH",
           "default_delta_gamma", "parameter_count", "evaluate",
           "sample_pulse", "bit_depth", "information_bits",
           "info_content", "quantize", "add_gaussian_noise",
           "pulse_to_dict", "pulse_from_dict", "write_pulse_csv")


# The resolution of a float64 mantissa.
#
DEFAULT_BIT_DEPTH = 52

# Relative slack allowed when checking a time lies within [0, T].
#
TIME_SLACK = 1e-12

logger = logging.getLogger(__name__)


class Envelope(Enum):
    """The shape multiplying the trigonometric correction."""

    NONE = "none"
    """No envelope."""

    SINE_RAMP = "sine-ramp"
    """sin(pi t / T), which forces gamma(0) = gamma(T) = gamma0."""

    @classmethod
    def from_name(cls, name: "str | Envelope") -> "Envelope":
        """Case-insensitive lookup."""

        if isinstance(name, cls):
            return name

        check = str(name).casefold()
        out = next((e for e in cls if e.value == check), None)
        if out is None:
            raise ValueError(f"Unrecognized envelope '{name}'")

        return out


@runtime_checkable
class Pulse(Protocol):
    """What the propagators need from a control field."""

    @property
    def duration(self) -> float:
        ...

    @property
    def n_samples(self) -> int:
        ...

    @property
    def bandwidth(self) -> float:
        ...

    @property
    def window(self) -> tuple[float, float]:
        ...

    @property
    def delta_gamma(self) -> float:
        ...

    def sample(self, times) -> np.ndarray:
        ...


def _check_horizon(horizon: float) -> None:
    if not (np.isfinite(horizon) and horizon > 0):
        raise ValueError(f"T must be finite and positive, not {horizon}")


def _check_times(times: np.ndarray, duration: float) -> None:
    slack = TIME_SLACK * duration
    if np.any(times < -slack) or np.any(times > duration + slack):
        bad = times[(times < -slack) | (times > duration + slack)][0]
        raise ValueError(f"t={bad} is outside [0, {duration}]")


def default_delta_gamma(gamma_min: float, gamma_max: float) -> float:
    """The quantization step matching `DEFAULT_BIT_DEPTH` bits."""
    return (gamma_max - gamma_min) / (2 ** DEFAULT_BIT_DEPTH - 1)


def parameter_count(n_modes: int) -> int:
    """The number of optimized reals for a basis with n_modes modes.

    Each mode has a sine and cosine amplitude. A basis with no modes
    is the constant-pulse baseline, where the offset gamma0 is the
    only parameter.
    """

    if n_modes < 0:
        raise ValueError(f"n_modes must be >= 0, not {n_modes}")

    return 1 if n_modes == 0 else 2 * n_modes


@dataclass(frozen=True, eq=False)
class CrabBasis:
    """The randomized frequencies of a CRAB expansion.

    Parameters
    ----------
    n_modes : int
        The number of frequencies (may be 0).
    horizon : float
        The pulse duration T.
    seed : int, optional
        Seeds the frequency jitter.
    envelope : Envelope, optional

    Notes
    -----
    The frequencies are w_k = 2 pi k (1 + r_k) / T, for k = 1 to
    n_modes, where r_k is drawn uniformly from [-0.5, 0.5).

    """

    n_modes: int
    horizon: float
    seed: int = 0
    envelope: Envelope = Envelope.NONE
    frequencies: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.n_modes < 0:
            raise ValueError(f"n_modes must be >= 0, not {self.n_modes}")

        _check_horizon(self.horizon)
        object.__setattr__(self, "envelope", Envelope.from_name(self.envelope))

        rng = np.random.default_rng(self.seed)
        jitter = rng.uniform(-0.5, 0.5, size=self.n_modes)
        k = np.arange(1, self.n_modes + 1)
        freqs = 2 * np.pi * k * (1 + jitter) / self.horizon
        freqs.flags.writeable = False
        object.__setattr__(self, "frequencies", freqs)

    @property
    def bandwidth(self) -> float:
        """The largest frequency, in cycles per unit time."""

        if self.n_modes == 0:
            return 0.0

        return float(self.frequencies.max() / (2 * np.pi))

    def with_seed(self, seed: int) -> "CrabBasis":
        """The same basis with a different frequency jitter."""
        return CrabBasis(self.n_modes, self.horizon, seed=seed,
                         envelope=self.envelope)

    def envelope_values(self, times: np.ndarray) -> np.ndarray:
        if self.envelope == Envelope.SINE_RAMP:
            return np.sin(np.pi * times / self.horizon)

        return np.ones_like(times)

    def design_matrix(self, times: np.ndarray) -> np.ndarray:
        """Columns are sin(w_1 t), cos(w_1 t), sin(w_2 t), ...

        The envelope is included.
        """

        phase = np.outer(times, self.frequencies)
        out = np.empty((times.size, 2 * self.n_modes))
        out[:, 0::2] = np.sin(phase)
        out[:, 1::2] = np.cos(phase)
        return out * self.envelope_values(times)[:, None]


def _check_window(gamma_min: float, gamma_max: float,
                  delta_gamma: float) -> None:
    if not (np.isfinite(gamma_min) and np.isfinite(gamma_max)):
        raise ValueError(f"amplitude window [{gamma_min}, {gamma_max}] must be finite")

    if gamma_min >= gamma_max:
        raise ValueError(f"gamma_min={gamma_min} must be less than gamma_max={gamma_max}")

    if not delta_gamma > 0:
        raise ValueError(f"delta_gamma must be positive, not {delta_gamma}")

    width = gamma_max - gamma_min
    if delta_gamma > width:
        raise ValueError(f"delta_gamma={delta_gamma} exceeds the window "
                         f"width {width}")


def _sample_count(duration: float, bandwidth: float) -> int:
    return max(1, math.ceil(duration * bandwidth - 1e-9))


@dataclass(frozen=True, eq=False)
class ControlPulse:
    """A CRAB pulse.

    The coefficients are stored interleaved: a_1, b_1, a_2, b_2, ...
    Evaluated values are clamped to [gamma_min, gamma_max].

    See Also
    --------
    PulseTemplate, evaluate

    """

    basis: CrabBasis
    coefficients: np.ndarray
    gamma0: float = 0.0
    gamma_min: float = -1.0
    gamma_max: float = 1.0
    delta_gamma: float | None = None

    def __post_init__(self) -> None:
        coeffs = np.array(self.coefficients, dtype=float).reshape(-1)
        nexp = 2 * self.basis.n_modes
        if coeffs.size != nexp:
            raise ValueError(f"expected {nexp} coefficients for "
                             f"{self.basis.n_modes} modes, not {coeffs.size}")

        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coefficients must be finite")

        if not np.isfinite(self.gamma0):
            raise ValueError(f"gamma0 must be finite, not {self.gamma0}")

        step = self.delta_gamma
        if step is None:
            step = default_delta_gamma(self.gamma_min, self.gamma_max)

        _check_window(self.gamma_min, self.gamma_max, step)

        coeffs.flags.writeable = False
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "delta_gamma", float(step))

    @property
    def duration(self) -> float:
        return self.basis.horizon

    @property
    def window(self) -> tuple[float, float]:
        return (self.gamma_min, self.gamma_max)

    @property
    def bandwidth(self) -> float:
        return self.basis.bandwidth

    @property
    def n_samples(self) -> int:
        """T times the bandwidth, rounded up (at least 1)."""
        return _sample_count(self.duration, self.bandwidth)

    def sample(self, times) -> np.ndarray:
        """Evaluate the pulse at the given times."""

        t = np.asarray(times, dtype=float).reshape(-1)
        _check_times(t, self.duration)
        t = np.clip(t, 0, self.duration)

        raw = self.gamma0 + self.basis.design_matrix(t) @ self.coefficients
        return np.clip(raw, self.gamma_min, self.gamma_max)


@dataclass(frozen=True, eq=False)
class SampledPulse:
    """A piecewise-constant pulse.

    Sample k holds on [k T / n, (k + 1) T / n). The samples are used
    as given, so noisy signals may leave the amplitude window; the
    window and step only describe the nominal signal.
    """

    samples: np.ndarray
    duration: float
    gamma_min: float = -1.0
    gamma_max: float = 1.0
    delta_gamma: float | None = None

    def __post_init__(self) -> None:
        values = np.array(self.samples, dtype=float).reshape(-1)
        if values.size == 0:
            raise ValueError("a sampled pulse needs at least one sample")

        if not np.all(np.isfinite(values)):
            raise ValueError("samples must be finite")

        _check_horizon(self.duration)

        step = self.delta_gamma
        if step is None:
            step = default_delta_gamma(self.gamma_min, self.gamma_max)

        _check_window(self.gamma_min, self.gamma_max, step)

        values.flags.writeable = False
        object.__setattr__(self, "samples", values)
        object.__setattr__(self, "delta_gamma", float(step))

    @property
    def window(self) -> tuple[float, float]:
        return (self.gamma_min, self.gamma_max)

    @property
    def n_samples(self) -> int:
        return self.samples.size

    @property
    def bandwidth(self) -> float:
        """n_s / T"""
        return self.n_samples / self.duration

    def sample(self, times) -> np.ndarray:
        t = np.asarray(times, dtype=float).reshape(-1)
        _check_times(t, self.duration)
        idx = np.floor(t * self.n_samples / self.duration).astype(int)
        return self.samples[np.clip(idx, 0, self.n_samples - 1)]


@dataclass(frozen=True)
class TimeReversed:
    """The pulse played backwards: gamma'(t) = gamma(T - t)."""

    pulse: Pulse

    @property
    def duration(self) -> float:
        return self.pulse.duration

    @property
    def window(self) -> tuple[float, float]:
        return self.pulse.window

    @property
    def delta_gamma(self) -> float:
        return self.pulse.delta_gamma

    @property
    def bandwidth(self) -> float:
        return self.pulse.bandwidth

    @property
    def n_samples(self) -> int:
        return self.pulse.n_samples

    def sample(self, times) -> np.ndarray:
        t = np.asarray(times, dtype=float).reshape(-1)
        _check_times(t, self.duration)
        return self.pulse.sample(np.clip(self.duration - t, 0, self.duration))


@dataclass(frozen=True)
class PulseTemplate:
    """The pulse settings that are not optimized."""

    gamma0: float = 0.0
    gamma_min: float = -1.0
    gamma_max: float = 1.0
    delta_gamma: float | None = None

    def __post_init__(self) -> None:
        step = self.delta_gamma
        if step is None:
            step = default_delta_gamma(self.gamma_min, self.gamma_max)

        _check_window(self.gamma_min, self.gamma_max, step)

    @property
    def width(self) -> float:
        return self.gamma_max - self.gamma_min

    def build(self, basis: CrabBasis, parameters) -> ControlPulse:
        """Create the pulse for the optimized parameters.

        For a basis with no modes the single parameter is the
        constant offset, otherwise the parameters are the
        interleaved sine and cosine amplitudes.
        """

        params = np.asarray(parameters, dtype=float).reshape(-1)
        gamma0 = self.gamma0
        if basis.n_modes == 0:
            if params.size != 1:
                raise ValueError("the constant pulse has one parameter, "
                                 f"not {params.size}")

            gamma0 = float(params[0])
            params = params[:0]

        return ControlPulse(basis, params, gamma0=gamma0,
                            gamma_min=self.gamma_min,
                            gamma_max=self.gamma_max,
                            delta_gamma=self.delta_gamma)


@dataclass(frozen=True)
class PulseInfoReport:
    """The classical information carried by a pulse."""

    bandwidth: float
    """Cycles per unit time."""

    bit_depth: float
    """Bits per sample."""

    duration: float
    n_samples: int
    information: float
    """Bits."""

    snr: float | None = None


def evaluate(pulse: Pulse, t: float) -> float:
    """Return gamma(t) for 0 <= t <= T.

    Examples
    --------

    >>> basis = CrabBasis(2, horizon=1.0, seed=3)
    >>> pulse = ControlPulse(basis, [0, 0, 0, 0], gamma0=0.3)
    >>> evaluate(pulse, 0.5)
    0.3

    """

    if not np.isfinite(t):
        raise ValueError(f"t must be finite, not {t}")

    return float(pulse.sample([t])[0])


def sample_pulse(pulse: Pulse, n: int) -> SampledPulse:
    """Sample a pulse at the midpoints of n uniform intervals."""

    if n < 1:
        raise ValueError(f"n must be >= 1, not {n}")

    times = (np.arange(n) + 0.5) * pulse.duration / n
    gmin, gmax = pulse.window
    return SampledPulse(pulse.sample(times), pulse.duration,
                        gamma_min=gmin, gamma_max=gmax,
                        delta_gamma=pulse.delta_gamma)


def bit_depth(width: float, delta_gamma: float) -> float:
    """log2(1 + width / delta_gamma)"""

    if not delta_gamma > 0:
        raise ValueError(f"delta_gamma must be positive, not {delta_gamma}")

    if not width > 0:
        raise ValueError(f"window width must be positive, not {width}")

    return float(np.log2(1 + width / delta_gamma))


def information_bits(duration: float, bandwidth: float, depth: float) -> float:
    """T * bandwidth * bit depth"""

    for name, value in [("T", duration), ("bandwidth", bandwidth),
                        ("bit depth", depth)]:
        if not value >= 0:
            raise ValueError(f"{name} must be >= 0, not {value}")

    return duration * bandwidth * depth


def info_content(pulse: Pulse, snr_power: float | None = None) -> PulseInfoReport:
    """How many bits does the pulse carry?

    Parameters
    ----------
    pulse : Pulse
    snr_power : float or None, optional
        If set, the signal is assumed to be sent through a channel
        with this (power) signal to noise ratio, and the bits per
        sample are log2(1 + S/N) rather than the quantization depth.

    Returns
    -------
    report : PulseInfoReport

    Examples
    --------

    >>> basis = CrabBasis(4, horizon=2.0)
    >>> pulse = ControlPulse(basis, np.zeros(8), gamma_min=0,
    ...                      gamma_max=255, delta_gamma=1)
    >>> info_content(pulse).bit_depth
    8.0

    """

    gmin, gmax = pulse.window
    if snr_power is None:
        depth = bit_depth(gmax - gmin, pulse.delta_gamma)
    else:
        if not snr_power > 0:
            raise ValueError(f"snr_power must be positive, not {snr_power}")

        depth = float(np.log2(1 + snr_power))

    bits = information_bits(pulse.duration, pulse.bandwidth, depth)
    return PulseInfoReport(bandwidth=pulse.bandwidth, bit_depth=depth,
                           duration=pulse.duration, n_samples=pulse.n_samples,
                           information=bits, snr=snr_power)


def quantize(samples, delta_gamma: float,
             window: tuple[float, float]) -> np.ndarray:
    """Snap each sample to the nearest level gamma_min + m delta_gamma.

    Samples are first clipped to the window. When the window width
    is not a multiple of delta_gamma the upper edge is also a level,
    so no sample moves by more than delta_gamma / 2.

    Examples
    --------

    >>> quantize([0.1, 0.6, 0.9], 1.0, (0, 1))
    array([0., 1., 1.])

    """

    values = np.asarray(samples, dtype=float).reshape(-1)
    if values.size == 0:
        raise ValueError("Unable to quantize an empty signal")

    gmin, gmax = window
    _check_window(gmin, gmax, delta_gamma)

    values = np.clip(values, gmin, gmax)
    nlevels = math.floor((gmax - gmin) / delta_gamma + 1e-9)
    steps = np.clip(np.rint((values - gmin) / delta_gamma), 0, nlevels)
    out = gmin + steps * delta_gamma

    # The partial step at the top of the window.
    #
    closer = np.abs(values - gmax) < np.abs(values - out)
    out[closer] = gmax
    return out


def add_gaussian_noise(samples, snr_power: float, seed: int,
                       hold: int = 1) -> np.ndarray:
    """Add white Gaussian noise at the given signal to noise ratio.

    Parameters
    ----------
    samples : array_like
    snr_power : float
        The ratio of the mean signal power, mean(s^2), to the noise
        variance. Use ``math.inf`` for a noiseless copy.
    seed : int
    hold : int, optional
        Each noise draw is held for this many consecutive samples, so
        the noise has len(samples) / hold independent values. The
        number of samples must be a multiple of it.

    Returns
    -------
    noisy : ndarray

    """

    values = np.array(samples, dtype=float).reshape(-1)
    if not snr_power > 0:
        raise ValueError(f"snr_power must be positive, not {snr_power}")

    if hold < 1 or values.size % hold != 0:
        raise ValueError(f"hold={hold} does not divide {values.size} samples")

    if math.isinf(snr_power):
        return values

    variance = np.mean(values ** 2) / snr_power
    rng = np.random.default_rng(seed)
    noise = rng.normal(scale=np.sqrt(variance), size=values.size // hold)
    return values + np.repeat(noise, hold)


def pulse_to_dict(pulse: ControlPulse) -> dict[str, Any]:
    """The JSON representation of a pulse."""

    return {"seed": int(pulse.basis.seed),
            "n_modes": pulse.basis.n_modes,
            "T": pulse.duration,
            "gamma0": pulse.gamma0,
            "gamma_min": pulse.gamma_min,
            "gamma_max": pulse.gamma_max,
            "delta_gamma": pulse.delta_gamma,
            "envelope": pulse.basis.envelope.value,
            "coefficients": [float(c) for c in pulse.coefficients]}


def pulse_from_dict(data: dict[str, Any]) -> ControlPulse:
    """Recreate a pulse from `pulse_to_dict` output."""

    try:
        basis = CrabBasis(int(data["n_modes"]), float(data["T"]),
                          seed=int(data["seed"]),
                          envelope=Envelope.from_name(data.get("envelope", "none")))
        return ControlPulse(basis, data["coefficients"],
                            gamma0=float(data.get("gamma0", 0.0)),
                            gamma_min=float(data.get("gamma_min", -1.0)),
                            gamma_max=float(data.get("gamma_max", 1.0)),
                            delta_gamma=data.get("delta_gamma"))
    except KeyError as exc:
        raise ValueError(f"pulse is missing the {exc} field") from None


def write_pulse_csv(path: str | Path, pulse: Pulse,
                    n_points: int | None = None) -> None:
    """Write the pulse, on a uniform grid over [0, T], as (t, gamma).

    The default grid has 16 points per sample plus the end point.
    """

    npts = 16 * pulse.n_samples + 1 if n_points is None else n_points
    if npts < 2:
        raise ValueError(f"n_points must be >= 2, not {npts}")

    times = np.linspace(0, pulse.duration, npts)
    values = pulse.sample(times)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "gamma"])
        for t, g in zip(times, values):
            writer.writerow([repr(float(t)), repr(float(g))])

    logger.info("Wrote %d pulse samples to %s", npts, path)

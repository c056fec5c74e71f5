#  SPDX-License-Identifier: GPL-3.0-or-later

"""Information-theoretic limits on bandwidth-limited control.

A pulse with n_s samples of kappa_s bits each can single out at most
2^(n_s kappa_s) targets, while covering a D-dimensional reachable set
with balls of radius epsilon needs about epsilon^-D of them. This
gives the precision limit

    epsilon >= 2^(-n_s kappa_s / D)

and, since n_s = T * bandwidth, a minimal control time. Replacing the
bit depth by the Shannon-Hartley capacity log2(1 + S/N) gives the
corresponding limits for a noisy channel. The quantum speed limit
(distance over the time-averaged generator norm) is evaluated
alongside. All logarithms are base 2.

The calculators here are pure arithmetic; `evaluate_bounds` collects
them for a pulse and `violations` compares an achieved objective
against them.

"""

from dataclasses import asdict, dataclass
import logging
import math
from typing import Any

import numpy as np

from .dynamics import PropagationConfig, control_samples
from .pulse import Pulse, PulseInfoReport
from .qcore import HamiltonianPair, ObjectKind, bures_angle, kind_of, \
    operator_norm, trace_distance, unitary_distance


__all__ = ("NUMERICAL_FLOOR", "BoundsReport", "kappa_epsilon",
           "information_lower_bits", "epsilon_info_bound",
           "ns_lower_bound", "ns_upper_bound", "time_lower_bound",
           "qsl_distance", "qsl_time", "epsilon_noise_bound",
           "small_noise_bound", "time_noise_bound", "upper_bound_info",
           "mps_parameter_estimate", "time_averaged_norm",
           "max_generator_norm", "evaluate_bounds", "violations")


NUMERICAL_FLOOR = 1e-12

logger = logging.getLogger(__name__)


def _positive(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be finite and positive, not {value}")


def _dimension(value: int) -> None:
    if value < 1:
        raise ValueError(f"the dimension must be >= 1, not {value}")


def _precision(epsilon: float, upper_ok: bool = False) -> None:
    good = 0 < epsilon <= 1 if upper_ok else 0 < epsilon < 1
    if not good:
        limit = "1]" if upper_ok else "1)"
        raise ValueError(f"epsilon must be in (0, {limit}, not {epsilon}")


def kappa_epsilon(epsilon: float) -> float:
    """The bits of precision in epsilon: -log2(epsilon)."""

    _precision(epsilon, upper_ok=True)
    return -math.log2(epsilon)


def information_lower_bits(d_w: int, epsilon: float) -> float:
    """D log2(1 / epsilon), the bits needed to pick one epsilon-ball."""

    _dimension(d_w)
    return d_w * kappa_epsilon(epsilon)


def epsilon_info_bound(horizon: float, bandwidth: float, kappa_s: float,
                       d_w: int) -> float:
    """The best reachable precision, 2^(-T bandwidth kappa_s / D).

    Parameters
    ----------
    horizon : float
        The pulse duration T.
    bandwidth : float
        In cycles per unit time.
    kappa_s : float
        Bits per sample; zero is allowed (and gives 1).
    d_w : int
        The reachable-set dimension.

    Examples
    --------

    >>> epsilon_info_bound(4, 2, 8, 16)
    0.0625

    """

    _positive("T", horizon)
    _positive("bandwidth", bandwidth)
    if not (math.isfinite(kappa_s) and kappa_s >= 0):
        raise ValueError(f"kappa_s must be finite and >= 0, not {kappa_s}")

    _dimension(d_w)
    return 2.0 ** (-horizon * bandwidth * kappa_s / d_w)


def ns_lower_bound(d_w: int) -> int:
    """The minimum number of samples when kappa_epsilon = kappa_s."""

    _dimension(d_w)
    return int(d_w)


def ns_upper_bound(d_w: int, epsilon: float, v_max: float,
                   poly_degree: int = 1) -> float:
    """D^k v_max / epsilon, the number of balls along a path."""

    _dimension(d_w)
    _precision(epsilon)
    _positive("v_max", v_max)
    if poly_degree < 0:
        raise ValueError(f"poly_degree must be >= 0, not {poly_degree}")

    return d_w ** poly_degree * v_max / epsilon


def time_lower_bound(d_w: int, bandwidth: float,
                     epsilon: float | None = None,
                     kappa_s: float | None = None) -> float:
    """The minimal control time at finite bandwidth.

    Parameters
    ----------
    d_w : int
    bandwidth : float
    epsilon, kappa_s : float or None, optional
        When both are given the time needed for precision epsilon,
        D log2(1 / epsilon) / (bandwidth kappa_s), is returned,
        otherwise D / bandwidth (the two agree when
        log2(1 / epsilon) = kappa_s).

    Examples
    --------

    >>> time_lower_bound(4, 2)
    2.0
    >>> time_lower_bound(4, 2, epsilon=2**-8, kappa_s=8)
    2.0

    """

    _dimension(d_w)
    _positive("bandwidth", bandwidth)
    if epsilon is None and kappa_s is None:
        return d_w / bandwidth

    if epsilon is None or kappa_s is None:
        raise ValueError("epsilon and kappa_s must be given together")

    _positive("kappa_s", kappa_s)
    return d_w * kappa_epsilon(epsilon) / (bandwidth * kappa_s)


def qsl_distance(initial, goal) -> float:
    """The distance used by the speed limit.

    This is the Bures angle for state vectors, the trace distance
    for density matrices and arccos(|Tr(U^dagger V)| / N) for
    propagators.
    """

    kind = kind_of(goal)
    if kind_of(initial) != kind:
        raise TypeError(f"can not compare {kind_of(initial).value} with {kind.value}")

    if kind == ObjectKind.PURE:
        return bures_angle(initial, goal)

    if kind == ObjectKind.DENSITY:
        return trace_distance(initial, goal)

    return unitary_distance(initial, goal)


def qsl_time(initial, goal, lambda_bar: float) -> float:
    """The speed-limit time: distance / lambda_bar.

    Examples
    --------

    >>> from qoc_bounds.qcore import PureState
    >>> qsl_time(PureState.basis(2, 0), PureState.basis(2, 1), 1.0)
    1.5707963267948966

    """

    _positive("lambda_bar", lambda_bar)
    return qsl_distance(initial, goal) / lambda_bar


def _snr(snr_power: float) -> None:
    if not snr_power > 0:
        raise ValueError(f"snr_power must be positive, not {snr_power}")


def epsilon_noise_bound(n_s: int, d_w: int, snr_power: float) -> float:
    """(1 + S/N)^(-n_s / D)

    Examples
    --------

    >>> epsilon_noise_bound(4, 4, 255)
    0.00390625

    """

    _snr(snr_power)
    _dimension(d_w)
    if n_s < 0:
        raise ValueError(f"n_s must be >= 0, not {n_s}")

    return 2.0 ** (-n_s * math.log2(1 + snr_power) / d_w)


def small_noise_bound(n_s: int, d_w: int, noise_to_signal: float) -> float:
    """(N/S)^(n_s / D), the noisy limit when N/S << 1."""

    _positive("noise_to_signal", noise_to_signal)
    _dimension(d_w)
    return noise_to_signal ** (n_s / d_w)


def time_noise_bound(d_w: int, bandwidth: float, epsilon: float,
                     snr_power: float) -> float:
    """D log2(1 / epsilon) / (bandwidth log2(1 + S/N))

    Examples
    --------

    >>> time_noise_bound(4, 2, 2**-8, 255)
    2.0

    """

    _dimension(d_w)
    _positive("bandwidth", bandwidth)
    _precision(epsilon, upper_ok=True)
    _snr(snr_power)
    return d_w * kappa_epsilon(epsilon) / (bandwidth * math.log2(1 + snr_power))


def upper_bound_info(d_w: int, epsilon: float, v_max: float,
                     poly_degree: int = 1) -> float:
    """The bits sufficient to steer along a path to precision epsilon.

    Parameters
    ----------
    d_w : int
    epsilon : float
        Must be less than 1; the value diverges as epsilon goes to 0.
    v_max : float
        The largest speed along the path. The path length T v_max is
        absorbed into the polynomial in D.
    poly_degree : int, optional
        The polynomial in D is taken to be D^poly_degree.

    Returns
    -------
    bits : float
        (D^k v_max / epsilon) D log2(1 / epsilon). This is an
        illustrative estimate and is never enforced.

    """

    nballs = ns_upper_bound(d_w, epsilon, v_max, poly_degree)
    return nballs * information_lower_bits(d_w, epsilon)


def mps_parameter_estimate(horizon: float, local_dim: int, entropy: float,
                           n_sites: int) -> float:
    """T d 2^(2 S) n, the parameters of a slightly-entangled chain."""

    _positive("T", horizon)
    _dimension(local_dim)
    _dimension(n_sites)
    if entropy < 0:
        raise ValueError(f"entropy must be >= 0, not {entropy}")

    return horizon * local_dim * 2.0 ** (2 * entropy) * n_sites


def time_averaged_norm(h: HamiltonianPair, pulse: Pulse,
                       cfg: PropagationConfig) -> float:
    """The mean operator norm of H(t) over the propagation grid."""

    gammas, _ = control_samples(pulse, cfg)
    hs = h.drift[None, :, :] + gammas[:, None, None] * h.control[None, :, :]
    return float(np.mean(np.linalg.norm(hs, ord=2, axis=(1, 2))))


def max_generator_norm(h: HamiltonianPair, window: tuple[float, float]) -> float:
    """||H_D|| + max|gamma| ||H_C||, which bounds ||H(t)||."""

    gmax = max(abs(window[0]), abs(window[1]))
    return operator_norm(h.drift) + gmax * operator_norm(h.control)


@dataclass(frozen=True)
class BoundsReport:
    """The limits for one pulse configuration.

    The bounds use the effective bandwidth n_s / T, so that the
    number of samples is exact.
    """

    d_w: int
    dimension_label: str
    """Which reachable-set dimension was supplied."""

    n_s: int
    kappa_s: float
    bandwidth: float
    duration: float
    eps_info: float
    ns_min: int
    t_min: float
    t_qsl: float
    epsilon: float | None = None
    snr: float | None = None
    eps_noise: float | None = None
    t_min_noise: float | None = None
    upper_bits: float | None = None

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def evaluate_bounds(info: PulseInfoReport,
                    d_w: int,
                    *,
                    t_qsl: float,
                    epsilon: float | None = None,
                    snr_power: float | None = None,
                    v_max: float | None = None,
                    poly_degree: int = 1,
                    dimension_label: str = "D_W"
                    ) -> BoundsReport:
    """Evaluate every bound for a pulse.

    Parameters
    ----------
    info : PulseInfoReport
        From `info_content` without a signal to noise ratio.
    d_w : int
    t_qsl : float
        The speed-limit time, from `qsl_time`.
    epsilon : float or None, optional
        The target precision. When set the minimal time is the
        precision form of `time_lower_bound`.
    snr_power : float or None, optional
        Adds the noisy-channel bounds.
    v_max : float or None, optional
        Adds the (illustrative) upper bound on the bits needed; it
        requires epsilon.
    poly_degree : int, optional
    dimension_label : str, optional
        Recorded in the report.

    Returns
    -------
    report : BoundsReport

    """

    n_s = info.n_samples
    bandwidth = n_s / info.duration
    kappa = info.bit_depth

    eps_info = epsilon_info_bound(info.duration, bandwidth, kappa, d_w)
    if epsilon is not None and kappa > 0:
        t_min = time_lower_bound(d_w, bandwidth, epsilon=epsilon, kappa_s=kappa)
    else:
        t_min = time_lower_bound(d_w, bandwidth)

    eps_noise = None
    t_noise = None
    if snr_power is not None:
        eps_noise = epsilon_noise_bound(n_s, d_w, snr_power)
        if epsilon is not None:
            t_noise = time_noise_bound(d_w, bandwidth, epsilon, snr_power)

    upper = None
    if v_max is not None and epsilon is not None:
        upper = upper_bound_info(d_w, epsilon, v_max, poly_degree)

    return BoundsReport(d_w=d_w, dimension_label=dimension_label, n_s=n_s,
                        kappa_s=kappa, bandwidth=bandwidth,
                        duration=info.duration, eps_info=eps_info,
                        ns_min=ns_lower_bound(d_w), t_min=t_min, t_qsl=t_qsl,
                        epsilon=epsilon, snr=snr_power, eps_noise=eps_noise,
                        t_min_noise=t_noise, upper_bits=upper)


def violations(report: BoundsReport, achieved: float,
               floor: float = NUMERICAL_FLOOR,
               noise: bool = True) -> list[str]:
    """Which limits does an achieved objective break?

    The precision limits are checked for every run. The time limits
    only apply when the run reached the report's epsilon. A goal at
    zero distance from the initial object (t_qsl = 0) needs no
    information, so nothing is checked for it.

    Parameters
    ----------
    report : BoundsReport
    achieved : float
        The objective reached.
    floor : float, optional
        The rounding allowance on the precision limits.
    noise : bool, optional
        Check the noisy-channel limit, when the report has one. It
        limits the best pulse sent through the channel; set this to
        False when ``achieved`` is the degradation of a pulse chosen
        before the noise was added.

    Returns
    -------
    reasons : list of str
        Empty when no limit is broken.

    """

    out: list[str] = []
    if report.t_qsl == 0:
        return out

    if achieved < report.eps_info - floor:
        out.append(f"objective {achieved:.6g} is below the information "
                   f"bound {report.eps_info:.6g}")

    if noise and report.eps_noise is not None and \
       achieved < report.eps_noise - floor:
        out.append(f"objective {achieved:.6g} is below the noise "
                   f"bound {report.eps_noise:.6g}")

    if report.epsilon is not None and achieved <= report.epsilon:
        if report.duration < report.t_qsl:
            out.append(f"epsilon reached at T={report.duration:g} below the "
                       f"speed limit {report.t_qsl:.6g}")

        if report.duration < report.t_min:
            out.append(f"epsilon reached at T={report.duration:g} below the "
                       f"minimal time {report.t_min:.6g}")

    for reason in out:
        logger.warning("Bound violation: %s", reason)

    return out

#  SPDX-License-Identifier: GPL-3.0-or-later
#
# Tests of the information and speed limits.
#

from dataclasses import replace
import math

import numpy as np

import pytest

from qoc_bounds import bounds as b
from qoc_bounds.dynamics import PropagationConfig
from qoc_bounds.pulse import PulseInfoReport, SampledPulse
from qoc_bounds.qcore import HamiltonianPair, PureState, pauli


QUBIT = HamiltonianPair(pauli("Z"), pauli("X"))

# Eight samples of two bits over T = 4.
#
INFO = PulseInfoReport(bandwidth=2, bit_depth=2, duration=4, n_samples=8,
                       information=16)


def test_kappa_epsilon():
    assert b.kappa_epsilon(0.25) == 2
    assert b.kappa_epsilon(1) == 0
    with pytest.raises(ValueError, match=r"epsilon must be in \(0, 1\]"):
        b.kappa_epsilon(0)


def test_information_lower_bits():
    assert b.information_lower_bits(4, 0.25) == 8
    with pytest.raises(ValueError, match="the dimension must be >= 1, not 0"):
        b.information_lower_bits(0, 0.25)


def test_epsilon_info_bound():
    assert b.epsilon_info_bound(4, 2, 8, 16) == 0.0625
    assert b.epsilon_info_bound(4, 2, 0, 16) == 1


@pytest.mark.parametrize("args", [(0, 2, 8, 16), (4, -1, 8, 16),
                                  (4, 2, -1, 16), (4, 2, math.inf, 16),
                                  (4, 2, 8, 0)])
def test_epsilon_info_bound_invalid(args):
    with pytest.raises(ValueError):
        b.epsilon_info_bound(*args)


def test_info_bound_decreases_with_time():
    values = [b.epsilon_info_bound(t, 2, 8, 16) for t in [1, 2, 4, 8]]
    assert all(y < x for x, y in zip(values[:-1], values[1:]))


def test_sample_bounds():
    assert b.ns_lower_bound(6) == 6
    assert b.ns_upper_bound(4, 0.1, 2.0) == pytest.approx(80)
    assert b.ns_upper_bound(4, 0.1, 2.0, poly_degree=2) == pytest.approx(320)
    with pytest.raises(ValueError, match="poly_degree must be >= 0"):
        b.ns_upper_bound(4, 0.1, 2.0, poly_degree=-1)


def test_time_lower_bound():
    assert b.time_lower_bound(4, 2) == 2
    assert b.time_lower_bound(4, 2, epsilon=2 ** -8, kappa_s=8) == 2
    assert b.time_lower_bound(4, 2, epsilon=2 ** -16, kappa_s=8) == 4
    with pytest.raises(ValueError, match="must be given together"):
        b.time_lower_bound(4, 2, epsilon=0.1)


def test_qsl_distance():
    assert b.qsl_distance(PureState.basis(2, 0), PureState.basis(2, 1)) == \
        pytest.approx(math.pi / 2)
    assert b.qsl_distance(np.eye(2), pauli("Z")) == pytest.approx(math.pi / 2)
    rho = PureState.basis(2, 0).projector()
    assert b.qsl_distance(rho, rho) == pytest.approx(0, abs=1e-12)
    with pytest.raises(TypeError):
        b.qsl_distance(rho, np.eye(2))


def test_qsl_time():
    t = b.qsl_time(PureState.basis(2, 0), PureState.basis(2, 1), 2.0)
    assert t == pytest.approx(math.pi / 4)
    with pytest.raises(ValueError, match="lambda_bar must be finite and positive"):
        b.qsl_time(PureState.basis(2, 0), PureState.basis(2, 1), 0)


def test_noise_bounds():
    assert b.epsilon_noise_bound(4, 4, 255) == 2 ** -8
    assert b.epsilon_noise_bound(0, 4, 255) == 1
    assert b.small_noise_bound(4, 2, 0.01) == pytest.approx(1e-4)
    assert b.time_noise_bound(4, 2, 2 ** -8, 255) == pytest.approx(2)


@pytest.mark.parametrize("args", [(-1, 4, 255), (4, 4, 0), (4, 0, 255)])
def test_epsilon_noise_bound_invalid(args):
    with pytest.raises(ValueError):
        b.epsilon_noise_bound(*args)


def test_noise_bound_matches_small_noise_limit():
    """log2(1 + S/N) is close to log2(S/N) for a large ratio."""

    exact = b.epsilon_noise_bound(6, 3, 1e6)
    approx = b.small_noise_bound(6, 3, 1e-6)
    assert exact == pytest.approx(approx, rel=1e-5)


def test_upper_bound_info():
    assert b.upper_bound_info(2, 0.5, 1.0) == pytest.approx(8)
    assert b.upper_bound_info(2, 0.5, 3.0) == pytest.approx(24)
    assert b.upper_bound_info(2, 0.5, 1.0, poly_degree=2) == pytest.approx(16)
    with pytest.raises(ValueError):
        b.upper_bound_info(2, 1.0, 1.0)


def test_mps_parameter_estimate():
    assert b.mps_parameter_estimate(2, 2, 1, 4) == 64
    with pytest.raises(ValueError, match="entropy must be >= 0"):
        b.mps_parameter_estimate(2, 2, -0.5, 4)


def test_generator_norms():
    pulse = SampledPulse([0.75, 0.75], 2.0)
    norm = b.time_averaged_norm(QUBIT, pulse, PropagationConfig(2.0))
    assert norm == pytest.approx(1.25)
    assert b.max_generator_norm(QUBIT, (-1, 0.5)) == pytest.approx(2)


def test_evaluate_bounds_plain():
    report = b.evaluate_bounds(INFO, 4, t_qsl=1.0)
    assert report.n_s == 8
    assert report.kappa_s == 2
    assert report.bandwidth == 2
    assert report.eps_info == 0.0625
    assert report.ns_min == 4
    assert report.t_min == 2
    assert report.eps_noise is None
    assert report.upper_bits is None
    assert report.to_dict()["dimension_label"] == "D_W"


def test_evaluate_bounds_full():
    report = b.evaluate_bounds(INFO, 4, t_qsl=1.0, epsilon=0.0625,
                               snr_power=3, v_max=1.0)
    assert report.t_min == 4
    assert report.eps_noise == 0.0625
    assert report.t_min_noise == pytest.approx(4)
    assert report.upper_bits == pytest.approx(1024)


def test_upper_bits_do_not_scale_with_duration():
    """The path length is already part of the polynomial in D."""

    longer = replace(INFO, duration=40, information=160)
    report = b.evaluate_bounds(longer, 4, t_qsl=1.0, epsilon=0.0625, v_max=1.0)
    assert report.upper_bits == pytest.approx(1024)
    assert report.upper_bits == b.upper_bound_info(4, 0.0625, 1.0)


def test_evaluate_bounds_without_bits():
    info = replace(INFO, bit_depth=0.0, information=0.0)
    report = b.evaluate_bounds(info, 4, t_qsl=1.0, epsilon=0.1)
    assert report.eps_info == 1
    assert report.t_min == 2


@pytest.fixture
def report():
    return b.evaluate_bounds(INFO, 4, t_qsl=1.0, epsilon=0.0625, snr_power=3)


def test_no_violations(report):
    assert b.violations(report, 0.0625) == []
    assert b.violations(report, 0.5) == []


def test_precision_violations(report, caplog):
    reasons = b.violations(report, 0.01)
    assert len(reasons) == 2
    assert "below the information bound" in reasons[0]
    assert "below the noise bound" in reasons[1]
    assert "Bound violation" in caplog.text


def test_noise_check_can_be_skipped(report):
    reasons = b.violations(report, 0.01, noise=False)
    assert len(reasons) == 1
    assert "below the information bound" in reasons[0]


def test_floor_absorbs_rounding(report):
    assert b.violations(report, 0.0625 - 1e-13) == []
    assert len(b.violations(report, 0.0625 - 1e-13, floor=0)) == 2


def test_time_violations(report):
    fast = replace(report, t_qsl=5.0, t_min=6.0)
    reasons = b.violations(fast, 0.07)
    assert reasons == []

    reasons = b.violations(replace(fast, eps_info=0.01, eps_noise=None), 0.05)
    assert len(reasons) == 2
    assert "below the speed limit" in reasons[0]
    assert "below the minimal time" in reasons[1]


def test_goal_at_zero_distance(report):
    assert b.violations(replace(report, t_qsl=0.0), 0.0) == []

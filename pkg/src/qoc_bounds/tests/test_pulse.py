#  SPDX-License-Identifier: GPL-3.0-or-later
#
# Tests of the CRAB pulses and their information content.
#

import csv
import json
import math

import numpy as np

import pytest

from qoc_bounds import pulse as p
from qoc_bounds.pulse import ControlPulse, CrabBasis, Envelope, SampledPulse


def test_parameter_count():
    assert p.parameter_count(0) == 1
    assert p.parameter_count(3) == 6
    with pytest.raises(ValueError):
        p.parameter_count(-1)


def test_default_delta_gamma():
    assert p.default_delta_gamma(-1, 1) == pytest.approx(2 / (2 ** 52 - 1))


@pytest.mark.parametrize("seed", [0, 1, 12])
def test_basis_frequencies(seed):
    """The jitter keeps w_k within [pi k / T, 3 pi k / T)."""

    horizon = 2.5
    basis = CrabBasis(5, horizon, seed=seed)
    k = np.arange(1, 6)
    assert np.all(basis.frequencies >= np.pi * k / horizon)
    assert np.all(basis.frequencies < 3 * np.pi * k / horizon)
    assert basis.bandwidth == pytest.approx(basis.frequencies.max() / (2 * np.pi))


def test_basis_is_seeded():
    a = CrabBasis(4, 1.0, seed=3)
    assert np.array_equal(a.frequencies, CrabBasis(4, 1.0, seed=3).frequencies)
    assert not np.array_equal(a.frequencies, a.with_seed(4).frequencies)
    assert a.with_seed(4).n_modes == 4


def test_basis_without_modes():
    basis = CrabBasis(0, 3.0)
    assert basis.bandwidth == 0
    assert basis.frequencies.size == 0


@pytest.mark.parametrize("nmodes,horizon", [(-1, 1), (2, 0), (2, -1), (2, np.inf)])
def test_basis_invalid(nmodes, horizon):
    with pytest.raises(ValueError):
        CrabBasis(nmodes, horizon)


def test_envelope_lookup():
    assert Envelope.from_name("SINE-RAMP") == Envelope.SINE_RAMP
    with pytest.raises(ValueError, match="Unrecognized envelope 'gauss'"):
        Envelope.from_name("gauss")


def test_design_matrix_columns():
    basis = CrabBasis(2, 1.0, seed=5)
    t = np.asarray([0.0, 0.25, 0.7])
    dm = basis.design_matrix(t)
    assert dm.shape == (3, 4)
    assert dm[:, 0] == pytest.approx(np.sin(basis.frequencies[0] * t))
    assert dm[:, 3] == pytest.approx(np.cos(basis.frequencies[1] * t))


def test_sine_ramp_pins_the_ends():
    basis = CrabBasis(3, 2.0, seed=1, envelope="sine-ramp")
    pulse = ControlPulse(basis, [0.3, -0.2, 0.1, 0.4, -0.1, 0.2], gamma0=0.25)
    ends = pulse.sample([0.0, 2.0])
    assert ends == pytest.approx([0.25, 0.25], abs=1e-12)


def test_pulse_is_clamped():
    basis = CrabBasis(1, 1.0, seed=0)
    pulse = ControlPulse(basis, [0, 10], gamma_min=-0.5, gamma_max=0.5)
    values = pulse.sample(np.linspace(0, 1, 101))
    assert values.max() == 0.5
    assert values.min() == -0.5


def test_pulse_coefficient_count():
    with pytest.raises(ValueError, match="expected 4 coefficients for 2 modes, not 3"):
        ControlPulse(CrabBasis(2, 1.0), [0, 0, 0])


@pytest.mark.parametrize("gmin,gmax,step", [(1, 1, None), (1, 0, None),
                                            (-1, 1, 0), (-1, 1, 3),
                                            (-np.inf, 1, None)])
def test_pulse_window(gmin, gmax, step):
    with pytest.raises(ValueError):
        ControlPulse(CrabBasis(1, 1.0), [0, 0], gamma_min=gmin, gamma_max=gmax,
                     delta_gamma=step)


def test_pulse_sample_count():
    basis = CrabBasis(3, 2.0, seed=2)
    pulse = ControlPulse(basis, np.zeros(6))
    assert pulse.n_samples == math.ceil(2.0 * basis.bandwidth)
    assert pulse.n_samples >= 1

    const = ControlPulse(CrabBasis(0, 2.0), [])
    assert const.n_samples == 1


@pytest.mark.parametrize("t", [-0.1, 1.1])
def test_evaluate_outside(t):
    pulse = ControlPulse(CrabBasis(1, 1.0), [0, 0])
    with pytest.raises(ValueError, match="is outside"):
        p.evaluate(pulse, t)


def test_evaluate_constant():
    pulse = ControlPulse(CrabBasis(2, 1.0, seed=3), np.zeros(4), gamma0=0.3)
    assert p.evaluate(pulse, 0.0) == pytest.approx(0.3)
    assert p.evaluate(pulse, 1.0) == pytest.approx(0.3)


def test_sampled_pulse():
    pulse = SampledPulse([0.1, -0.2, 0.3, 0.4], 2.0)
    assert pulse.n_samples == 4
    assert pulse.bandwidth == 2.0
    assert list(pulse.sample([0.0, 0.49, 0.5, 1.2, 2.0])) == [0.1, 0.1, -0.2, 0.3, 0.4]


def test_sampled_pulse_invalid():
    with pytest.raises(ValueError, match="at least one sample"):
        SampledPulse([], 1.0)

    with pytest.raises(ValueError, match="finite"):
        SampledPulse([0, np.nan], 1.0)


def test_sample_pulse_uses_midpoints():
    basis = CrabBasis(2, 3.0, seed=4)
    pulse = ControlPulse(basis, [0.2, 0.1, -0.3, 0.05])
    sampled = p.sample_pulse(pulse, 6)
    mids = (np.arange(6) + 0.5) * 0.5
    assert sampled.samples == pytest.approx(pulse.sample(mids))
    assert sampled.window == pulse.window
    assert sampled.delta_gamma == pulse.delta_gamma


def test_time_reversed():
    basis = CrabBasis(2, 3.0, seed=4)
    pulse = ControlPulse(basis, [0.2, 0.1, -0.3, 0.05])
    rev = p.TimeReversed(pulse)
    t = np.asarray([0.0, 0.4, 2.9])
    assert rev.sample(t) == pytest.approx(pulse.sample(3.0 - t))
    assert rev.n_samples == pulse.n_samples
    assert isinstance(rev, p.Pulse)


def test_template_build():
    tmpl = p.PulseTemplate(gamma0=0.1)
    basis = CrabBasis(2, 1.0)
    pulse = tmpl.build(basis, [1, 2, 3, 4])
    assert pulse.gamma0 == 0.1
    assert list(pulse.coefficients) == [1, 2, 3, 4]
    assert tmpl.width == 2


def test_template_build_constant():
    tmpl = p.PulseTemplate(gamma0=0.1)
    pulse = tmpl.build(CrabBasis(0, 1.0), [0.6])
    assert pulse.gamma0 == 0.6
    assert p.evaluate(pulse, 0.5) == pytest.approx(0.6)

    with pytest.raises(ValueError, match="one parameter, not 2"):
        tmpl.build(CrabBasis(0, 1.0), [0.6, 0.1])


@pytest.mark.parametrize("width,step,expected", [(255, 1, 8), (1, 1, 1), (3, 1, 2)])
def test_bit_depth(width, step, expected):
    assert p.bit_depth(width, step) == pytest.approx(expected)


def test_default_bit_depth():
    pulse = ControlPulse(CrabBasis(1, 1.0), [0, 0])
    assert p.info_content(pulse).bit_depth == pytest.approx(p.DEFAULT_BIT_DEPTH)


def test_information_bits():
    assert p.information_bits(4, 2, 8) == 64
    with pytest.raises(ValueError, match="bandwidth must be >= 0"):
        p.information_bits(1, -1, 8)


def test_info_content_noisy_channel():
    pulse = SampledPulse(np.zeros(8), 4.0)
    report = p.info_content(pulse, snr_power=3)
    assert report.bit_depth == pytest.approx(2)
    assert report.information == pytest.approx(16)
    assert report.n_samples == 8
    assert report.snr == 3


def test_quantize_levels():
    got = p.quantize([-2, -0.74, 0.1, 0.26, 2], 0.5, (-1, 1))
    assert list(got) == [-1, -0.5, 0, 0.5, 1]


def test_quantize_partial_step():
    """The window 0 to 1 with a step of 0.4 has levels 0, 0.4, 0.8 and 1."""

    got = p.quantize([0.95, 0.85, 0.5], 0.4, (0, 1))
    assert got == pytest.approx([1, 0.8, 0.4])


def test_quantize_error_is_bounded():
    rng = np.random.default_rng(2)
    values = rng.uniform(-1, 1, 1000)
    got = p.quantize(values, 0.03, (-1, 1))
    assert np.max(np.abs(got - values)) <= 0.015 + 1e-12


def test_noise_is_seeded():
    signal = np.sin(np.linspace(0, 3, 50))
    a = p.add_gaussian_noise(signal, 100, seed=4)
    b = p.add_gaussian_noise(signal, 100, seed=4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, p.add_gaussian_noise(signal, 100, seed=5))


def test_noise_power():
    signal = np.ones(200_000)
    noisy = p.add_gaussian_noise(signal, 4, seed=1)
    assert np.var(noisy - signal) == pytest.approx(0.25, rel=0.02)


def test_noise_infinite_snr():
    signal = np.asarray([0.1, 0.2])
    assert list(p.add_gaussian_noise(signal, math.inf, seed=0)) == [0.1, 0.2]
    with pytest.raises(ValueError):
        p.add_gaussian_noise(signal, 0, seed=0)


def test_noise_hold():
    signal = np.linspace(0.5, 1.5, 12)
    noise = p.add_gaussian_noise(signal, 10, seed=2, hold=4) - signal
    blocks = noise.reshape(3, 4)
    assert np.allclose(blocks, blocks[:, :1])
    assert len(set(np.round(blocks[:, 0], 12))) == 3

    assert np.array_equal(p.add_gaussian_noise(signal, 10, seed=2, hold=1),
                          p.add_gaussian_noise(signal, 10, seed=2))

    with pytest.raises(ValueError, match="hold=5 does not divide 12 samples"):
        p.add_gaussian_noise(signal, 10, seed=2, hold=5)


def test_pulse_json():
    basis = CrabBasis(2, 1.5, seed=9, envelope="sine-ramp")
    pulse = ControlPulse(basis, [0.1, 0.2, -0.3, 0.4], gamma0=0.05,
                         gamma_min=-2, gamma_max=2, delta_gamma=0.01)
    data = json.loads(json.dumps(p.pulse_to_dict(pulse)))
    back = p.pulse_from_dict(data)
    t = np.linspace(0, 1.5, 17)
    assert np.array_equal(back.sample(t), pulse.sample(t))
    assert back.delta_gamma == 0.01
    assert back.basis.envelope == Envelope.SINE_RAMP


def test_pulse_json_missing_field():
    with pytest.raises(ValueError, match="missing the 'coefficients' field"):
        p.pulse_from_dict({"n_modes": 0, "T": 1, "seed": 0})


def test_write_pulse_csv(tmp_path):
    pulse = ControlPulse(CrabBasis(1, 2.0, seed=1), [0.3, -0.1])
    outfile = tmp_path / "pulse.csv"
    p.write_pulse_csv(outfile, pulse, n_points=5)

    with open(outfile, newline="") as fh:
        rows = list(csv.reader(fh))

    assert rows[0] == ["t", "gamma"]
    assert len(rows) == 6
    assert float(rows[-1][0]) == 2.0
    assert float(rows[3][1]) == pytest.approx(pulse.sample([1.0])[0])


def test_write_pulse_csv_default_points(tmp_path):
    pulse = SampledPulse([0.0, 1.0], 1.0)
    outfile = tmp_path / "pulse.csv"
    p.write_pulse_csv(outfile, pulse)
    assert len(outfile.read_text().splitlines()) == 16 * 2 + 1 + 1

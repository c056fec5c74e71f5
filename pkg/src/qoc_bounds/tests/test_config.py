#  SPDX-License-Identifier: GPL-3.0-or-later
#
# Tests of the experiment configuration.
#

import json

import pytest

from qoc_bounds import config as c
from qoc_bounds.config import ExperimentConfig, GoalKind, PresetName, \
    RunParameters, SweepVariable, SystemPreset
from qoc_bounds.dynamics import SamplingRule
from qoc_bounds.pulse import Envelope
from qoc_bounds.qcore import ObjectKind


EXAMPLE = {"system_preset": {"name": "Ising-Chain", "n": 3},
           "object_kind": "PURE",
           "sweep_variable": "n_modes",
           "sweep_values": [0, 1, 2, 4],
           "fixed_parameters": {"T": 4.0, "epsilon": 1e-6, "envelope": "sine-ramp"},
           "seeds": [1, 2, 3],
           "budget": 4000,
           "output_path": "out/n_modes"}


def test_from_dict():
    cfg = ExperimentConfig.from_dict(EXAMPLE)
    assert cfg.system_preset.name == PresetName.ISING_CHAIN
    assert cfg.system_preset.n == 3
    assert cfg.object_kind == ObjectKind.PURE
    assert cfg.sweep_variable == SweepVariable.N_MODES
    assert cfg.sweep_values == (0, 1, 2, 4)
    assert cfg.fixed_parameters.epsilon == 1e-6
    assert cfg.fixed_parameters.envelope == Envelope.SINE_RAMP
    assert cfg.seeds == (1, 2, 3)


def test_preset_as_string():
    cfg = ExperimentConfig.from_dict({"system_preset": "single-qubit",
                                      "object_kind": "unitary"})
    assert cfg.system_preset.name == PresetName.SINGLE_QUBIT
    assert cfg.sweep_variable is None
    assert cfg.fixed_parameters == RunParameters()


def test_to_dict_round_trip():
    cfg = ExperimentConfig.from_dict(EXAMPLE)
    data = json.loads(json.dumps(cfg.to_dict()))
    assert ExperimentConfig.from_dict(data) == cfg
    assert data["system_preset"]["name"] == "ising-chain"
    assert data["fixed_parameters"]["sampling"] == "midpoint"


@pytest.mark.parametrize("key", ["system_preset", "object_kind"])
def test_required_keys(key):
    data = dict(EXAMPLE)
    del data[key]
    with pytest.raises(ValueError, match=f"the configuration is missing '{key}'"):
        ExperimentConfig.from_dict(data)


def test_unknown_keys():
    with pytest.raises(ValueError, match="Unrecognized configuration keys: colour"):
        ExperimentConfig.from_dict(EXAMPLE | {"colour": "red"})

    with pytest.raises(ValueError, match="Unrecognized fixed_parameters keys: tau"):
        RunParameters.from_dict({"tau": 1})


def test_unknown_names():
    with pytest.raises(ValueError, match="Unrecognized sweep variable 'omega'"):
        ExperimentConfig.from_dict(EXAMPLE | {"sweep_variable": "omega"})

    with pytest.raises(ValueError, match="Unrecognized preset 'qutrit'"):
        SystemPreset("qutrit")


def test_sweep_variable_case():
    cfg = ExperimentConfig("single-qubit", "pure", sweep_variable="t",
                           sweep_values=[1, 2])
    assert cfg.sweep_variable == SweepVariable.T
    assert SweepVariable("snr") == SweepVariable.SNR


@pytest.mark.parametrize("kwargs,msg",
                         [({"sweep_values": [1, 1]}, "strictly increasing"),
                          ({"seeds": []}, "at least one seed"),
                          ({"seeds": [1, 1]}, "distinct"),
                          ({"seeds": [-1]}, "non-negative"),
                          ({"budget": 1}, "budget must be >= 2")])
def test_experiment_invalid(kwargs, msg):
    with pytest.raises(ValueError, match=msg):
        ExperimentConfig("single-qubit", "pure", **kwargs)


def test_check_sweep():
    cfg = ExperimentConfig("single-qubit", "pure")
    with pytest.raises(ValueError, match="no sweep_variable"):
        cfg.check_sweep()

    cfg = ExperimentConfig("single-qubit", "pure", sweep_variable="T")
    with pytest.raises(ValueError, match="sweep_values can not be empty"):
        cfg.check_sweep()


def test_run_parameter_names():
    params = RunParameters(sampling="LEFT", goal="Haar", envelope="none")
    assert params.sampling == SamplingRule.LEFT
    assert params.goal == GoalKind.HAAR
    assert params.to_dict()["goal"] == "haar"


@pytest.mark.parametrize("kwargs", [{"T": 0}, {"n_modes": -1}, {"restarts": 0},
                                    {"epsilon": 1}, {"segments_per_sample": 0},
                                    {"noise_seeds": 0}, {"fit_decades": 0},
                                    {"max_modes": 0}, {"penalty": -1},
                                    {"goal": "nearby"}])
def test_run_parameters_invalid(kwargs):
    with pytest.raises(ValueError):
        RunParameters(**kwargs)


@pytest.mark.parametrize("kwargs", [{"n": 1}, {"n": c.MAX_CHAIN_QUBITS + 1},
                                    {"control": "y"}])
def test_ising_preset_invalid(kwargs):
    with pytest.raises(ValueError):
        SystemPreset("ising-chain", **kwargs)


def test_random_pair_invalid():
    with pytest.raises(ValueError, match="needs N >= 2"):
        SystemPreset("random-pair", N=1)


def test_preset_helpers():
    preset = SystemPreset("ising-chain", n=2, control="X")
    assert preset.control == "x"
    assert preset.with_sites(4).n == 4
    assert preset.with_sites(4).control == "x"
    assert "n=2" in preset.label()
    assert SystemPreset("random-pair", N=3).label() == "random-pair N=3 seed=0"
    assert SystemPreset("single-qubit").label() == "single-qubit"


def test_load_config(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(EXAMPLE))
    assert c.load_config(path) == ExperimentConfig.from_dict(EXAMPLE)


@pytest.mark.parametrize("text,msg", [("{", "is not valid JSON"),
                                      ("[1, 2]", "must contain a JSON object")])
def test_load_config_invalid(tmp_path, text, msg):
    path = tmp_path / "cfg.json"
    path.write_text(text)
    with pytest.raises(ValueError, match=msg):
        c.load_config(path)


def test_config_hash():
    cfg = ExperimentConfig.from_dict(EXAMPLE)
    digest = c.config_hash(cfg)
    assert len(digest) == 64
    assert c.config_hash(ExperimentConfig.from_dict(EXAMPLE)) == digest
    assert c.config_hash(ExperimentConfig.from_dict(EXAMPLE | {"budget": 10})) != digest

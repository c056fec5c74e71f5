"""Example of the qoc_bounds interface"""

import numpy as np

import qoc_bounds as q
from qoc_bounds.config import SystemPreset
from qoc_bounds.presets import build_system

print(f"Module version: {q.__version__}")

# The Lie algebra of each model system.
#
for preset in [SystemPreset("single-qubit"),
               SystemPreset("ising-chain", n=2),
               SystemPreset("ising-chain", n=2, g=0, control="x"),
               SystemPreset("random-pair", N=4, seed=2)]:
    closure = q.lie_closure(build_system(preset))
    print(f"{preset.label():60s} dimension={closure.dimension:3d} "
          f"controllable={closure.controllable}")

print("")

# Flip a qubit with an increasing number of CRAB modes.
#
h = build_system(SystemPreset("single-qubit"))
psi0 = q.PureState.basis(2, 0)
psi1 = q.PureState.basis(2, 1)
horizon = 4.0
d_w = q.reachable_dim(q.lie_closure(h), "pure")
t_qsl = q.qsl_time(psi0, psi1, q.max_generator_norm(h, (-1, 1)))

print("| modes | objective | n_s | eps_info  | evaluations |")
print("| ----- | --------- | --- | --------- | ----------- |")
for nmodes in [0, 1, 2, 4]:
    problem = q.ControlProblem(h, psi0, psi1, horizon, epsilon=1e-6)
    basis = q.CrabBasis(nmodes, horizon, seed=1)
    result = q.optimize(problem, basis, restarts=3, budget=3000, seed=1)
    pulse = q.best_pulse(result, basis)

    report = q.evaluate_bounds(q.info_content(pulse), d_w, t_qsl=t_qsl,
                               epsilon=problem.epsilon)
    print(f"| {nmodes:5d} | {result.objective:9.2e} | {report.n_s:3d} "
          f"| {report.eps_info:9.2e} | {result.evaluations:11d} |")

print("")

# How much does the last pulse degrade when noise is added?
#
pcfg = q.PropagationConfig(horizon)
samples, _ = q.control_samples(pulse, pcfg)
played = q.PropagationConfig(horizon, 1)
for ratio in [1e-4, 1e-3, 1e-2]:
    values = []
    for seed in range(20):
        noisy = q.add_gaussian_noise(samples, 1 / ratio, seed=seed)
        values.append(q.objective(problem, q.SampledPulse(noisy, horizon), played))

    print(f"N/S={ratio:7.1e}  mean objective={np.mean(values):9.2e}")

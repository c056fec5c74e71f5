#  SPDX-License-Identifier: GPL-3.0-or-later

"""Bandwidth-limited quantum optimal control and its information bounds.

A quantum system is steered by a single classical field gamma(t)
that enters the Hamiltonian as H(t) = H_D + gamma(t) H_C. A field of
duration T, bandwidth and amplitude resolution carries a finite
number of bits, and this limits how precisely, and how quickly, a
goal can be reached. This package simulates such control problems
and checks the limits empirically.

There are four groups of symbols in this package:

1. the quantum objects and their distances (`PureState`,
   `DensityMatrix`, `HamiltonianPair`, `fidelity_pure`,
   `trace_distance`, `gate_infidelity`, ...);
2. pulses (`CrabBasis`, `ControlPulse`, `SampledPulse`) and their
   information content (`info_content`), and the piecewise-constant
   time evolution (`propagate`);
3. controllability (`lie_closure`, `reachable_dim`) and the
   Nelder-Mead search for pulses (`optimize`);
4. the bound calculators (`epsilon_info_bound`, `time_lower_bound`,
   `epsilon_noise_bound`, ...), and the sweeps in
   `qoc_bounds.harness` that confront them with optimized pulses.

The ``qoc-bounds`` command (or ``python -m qoc_bounds``) runs these
from a JSON configuration.

Examples
--------

The dynamical Lie algebra of a qubit driven by sigma_x about sigma_z
is su(2):

>>> import qoc_bounds as q
>>> h = q.HamiltonianPair(q.pauli("Z"), q.pauli("X"))
>>> q.lie_closure(h).dimension
3

A pulse lasting T = 4 with 8 samples of 8 bits carries 64 bits. The
best precision it can give for a reachable set of dimension 16 is
2^-4:

>>> q.information_bits(4, 2, 8)
64
>>> q.epsilon_info_bound(4, 2, 8, 16)
0.0625

Steer the qubit from |0> to |1> with four CRAB modes:

>>> problem = q.ControlProblem(h, q.PureState.basis(2, 0),
...                            q.PureState.basis(2, 1), horizon=4,
...                            epsilon=0.01)
>>> basis = q.CrabBasis(4, 4, seed=1)
>>> result = q.optimize(problem, basis, restarts=3, budget=2000, seed=1)
>>> result.converged
True

"""

__version__ = "0.1.0"

from .qcore import *
from .pulse import *
from .dynamics import *
from .controllability import *
from .optimizer import *
from .bounds import *

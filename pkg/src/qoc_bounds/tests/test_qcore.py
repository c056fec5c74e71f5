#  SPDX-License-Identifier: GPL-3.0-or-later
#
# Tests of the quantum objects and their distances.
#

import numpy as np
import scipy.linalg

import pytest

from qoc_bounds import qcore
from qoc_bounds.qcore import DensityMatrix, HamiltonianPair, ObjectKind, \
    PureState


SX = np.asarray([[0, 1], [1, 0]], dtype=complex)
SZ = np.asarray([[1, 0], [0, -1]], dtype=complex)


def bell():
    return PureState.from_vector([1, 0, 0, 1])


@pytest.mark.parametrize("dim", [1, 2, 4, 8])
@pytest.mark.parametrize("t", [0.0, 0.3, -2.5])
def test_expm_matches_scipy(dim, t):
    rng = np.random.default_rng(dim)
    h = qcore.random_hermitian(dim, rng)
    got = qcore.expm_hermitian_scaled(h, t)
    expected = scipy.linalg.expm(-1j * t * h)
    assert qcore.allclose(got, expected, atol=1e-10)
    assert qcore.is_unitary(got, tol=1e-10)


def test_expm_rejects_non_hermitian():
    with pytest.raises(qcore.NotHermitianError) as exc:
        qcore.expm_hermitian_scaled([[0, 1], [0, 0]], 1.0)

    assert exc.value.norm == pytest.approx(np.sqrt(2))
    assert isinstance(exc.value, ValueError)


@pytest.mark.parametrize("t", [np.nan, np.inf])
def test_expm_rejects_bad_time(t):
    with pytest.raises(ValueError, match="^t must be finite"):
        qcore.expm_hermitian_scaled(SZ, t)


def test_allclose_needs_matching_shapes():
    assert not qcore.allclose(np.zeros(2), np.zeros(3), atol=1)
    assert qcore.allclose([1, 2], [1.05, 2], atol=0.1)
    assert not qcore.allclose([1, 2], [1.05, 2], atol=0.01)


@pytest.mark.parametrize("arg", [[1, 2, 3], np.zeros((2, 2, 2))])
def test_as_matrix_needs_2d(arg):
    with pytest.raises(qcore.DimensionError):
        qcore.as_matrix(arg)


def test_as_matrix_square():
    with pytest.raises(qcore.DimensionError, match="must be square, not 2x3"):
        qcore.as_matrix(np.zeros((2, 3)))

    assert qcore.as_matrix(np.zeros((2, 3)), square=False).shape == (2, 3)


def test_maximum_dimension():
    with pytest.raises(qcore.DimensionError, match="maximum supported"):
        PureState.basis(qcore.MAX_DIM + 1, 0)


def test_pure_state_must_be_normalized():
    with pytest.raises(ValueError, match="^state vector is not normalized"):
        PureState([1, 1])

    psi = PureState.from_vector([1, 1])
    assert np.linalg.norm(psi.amplitudes) == pytest.approx(1)


def test_pure_state_is_read_only():
    psi = PureState.basis(2, 0)
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 0


def test_pure_state_zero_vector():
    with pytest.raises(ValueError, match="zero vector"):
        PureState.from_vector([0, 0])


@pytest.mark.parametrize("index", [-1, 2])
def test_basis_index(index):
    with pytest.raises(ValueError, match="is outside"):
        PureState.basis(2, index)


def test_density_matrix_checks():
    with pytest.raises(ValueError, match="unit trace"):
        DensityMatrix(np.eye(2))

    with pytest.raises(ValueError, match="positive semi-definite"):
        DensityMatrix(np.diag([1.5, -0.5]))

    with pytest.raises(qcore.NotHermitianError):
        DensityMatrix([[0.5, 0.5], [0, 0.5]])


def test_hamiltonian_pair_shapes():
    with pytest.raises(qcore.DimensionError):
        HamiltonianPair(SZ, np.eye(3))


def test_hamiltonian_pair_normalized():
    h = HamiltonianPair(3 * SZ, np.zeros((2, 2))).normalized()
    assert qcore.operator_norm(h.drift) == pytest.approx(1)
    assert qcore.allclose(h.control, np.zeros((2, 2)), atol=0)


def test_hamiltonian_pair_at():
    h = HamiltonianPair(SZ, SX)
    assert qcore.allclose(h.at(0.5), SZ + 0.5 * SX, atol=0)
    assert qcore.allclose(h.negated().at(0.5), -(SZ + 0.5 * SX), atol=0)


@pytest.mark.parametrize("name,expected",
                         [("pure", ObjectKind.PURE), ("DENSITY", ObjectKind.DENSITY),
                          ("Unitary", ObjectKind.UNITARY)])
def test_object_kind_lookup(name, expected):
    assert ObjectKind.from_name(name) == expected


def test_object_kind_unknown():
    with pytest.raises(ValueError, match="Unrecognized object kind 'mixed'"):
        ObjectKind.from_name("mixed")


def test_kind_of():
    assert qcore.kind_of(PureState.basis(2, 0)) == ObjectKind.PURE
    assert qcore.kind_of(DensityMatrix.maximally_mixed(2)) == ObjectKind.DENSITY
    assert qcore.kind_of(np.eye(2)) == ObjectKind.UNITARY
    with pytest.raises(TypeError):
        qcore.kind_of([1, 0])


def test_fidelity_pure():
    zero = PureState.basis(2, 0)
    plus = PureState.from_vector([1, 1])
    assert qcore.fidelity_pure(zero, zero) == pytest.approx(1)
    assert qcore.fidelity_pure(zero, PureState.basis(2, 1)) == 0
    assert qcore.fidelity_pure(zero, plus) == pytest.approx(0.5)
    assert qcore.fidelity_pure(plus, zero) == pytest.approx(0.5)


def test_fidelity_dimension_mismatch():
    with pytest.raises(qcore.DimensionError):
        qcore.fidelity_pure(PureState.basis(2, 0), PureState.basis(3, 0))


def test_mixed_state_fidelity_reduces_to_pure():
    rng = np.random.default_rng(7)
    a = qcore.haar_state(4, rng)
    b = qcore.haar_state(4, rng)
    got = qcore.mixed_state_fidelity(a.projector(), b.projector())
    assert got == pytest.approx(qcore.fidelity_pure(a, b), abs=1e-10)


def test_mixed_state_fidelity_identical():
    rho = DensityMatrix(np.diag([0.7, 0.2, 0.1]))
    assert qcore.mixed_state_fidelity(rho, rho) == pytest.approx(1, abs=1e-12)


def test_trace_distance():
    zero = PureState.basis(2, 0).projector()
    one = PureState.basis(2, 1).projector()
    mixed = DensityMatrix.maximally_mixed(2)
    assert qcore.trace_distance(zero, one) == pytest.approx(1)
    assert qcore.trace_distance(zero, zero) == pytest.approx(0, abs=1e-15)
    assert qcore.trace_distance(zero, mixed) == pytest.approx(0.5)


def test_gate_infidelity_ignores_global_phase():
    rng = np.random.default_rng(3)
    u = qcore.haar_unitary(4, rng)
    assert qcore.gate_infidelity(u, np.exp(0.7j) * u) == pytest.approx(0, abs=1e-12)
    assert qcore.gate_infidelity(np.eye(2), SX) == pytest.approx(1)


def test_gate_infidelity_needs_unitaries():
    with pytest.raises(qcore.NotUnitaryError) as exc:
        qcore.gate_infidelity(np.eye(2), 2 * np.eye(2))

    assert exc.value.deviation == pytest.approx(np.sqrt(18))


def test_unitary_distance():
    assert qcore.unitary_distance(np.eye(2), np.eye(2)) == pytest.approx(0, abs=1e-7)
    assert qcore.unitary_distance(np.eye(2), SZ) == pytest.approx(np.pi / 2)


def test_bures_angle():
    zero = PureState.basis(2, 0)
    assert qcore.bures_angle(zero, PureState.basis(2, 1)) == pytest.approx(np.pi / 2)
    assert qcore.bures_angle(zero, PureState.from_vector([1, 1])) == pytest.approx(np.pi / 4)


def test_partial_trace_bell():
    reduced = qcore.partial_trace(bell().projector(), [2, 2], 1)
    assert qcore.allclose(reduced.matrix, np.eye(2) / 2, atol=1e-12)


def test_partial_trace_product():
    rho_a = DensityMatrix(np.diag([0.25, 0.75]))
    rho_b = DensityMatrix(np.diag([0.5, 0.3, 0.2]))
    rho = DensityMatrix(np.kron(rho_a.matrix, rho_b.matrix))

    got_a = qcore.partial_trace(rho, [2, 3], 0)
    got_b = qcore.partial_trace(rho, (2, 3), [1])
    assert qcore.allclose(got_a.matrix, rho_a.matrix, atol=1e-12)
    assert qcore.allclose(got_b.matrix, rho_b.matrix, atol=1e-12)

    full = qcore.partial_trace(rho, [2, 3], [0, 1])
    assert qcore.allclose(full.matrix, rho.matrix, atol=1e-12)


def test_partial_trace_keeps_order_of_three():
    rng = np.random.default_rng(11)
    states = [qcore.haar_state(2, rng) for _ in range(3)]
    psi = PureState(np.kron(np.kron(states[0].amplitudes, states[1].amplitudes),
                            states[2].amplitudes))
    got = qcore.partial_trace(psi.projector(), [2, 2, 2], [2, 0])
    expected = np.kron(states[0].projector().matrix, states[2].projector().matrix)
    assert qcore.allclose(got.matrix, expected, atol=1e-12)


def test_partial_trace_errors():
    rho = DensityMatrix.maximally_mixed(4)
    with pytest.raises(qcore.DimensionError):
        qcore.partial_trace(rho, [2, 3], 0)

    with pytest.raises(ValueError, match="subsystem 2 is outside"):
        qcore.partial_trace(rho, [2, 2], 2)

    with pytest.raises(ValueError, match="at least one subsystem"):
        qcore.partial_trace(rho, [2, 2], [])


def test_bipartite_entropy():
    assert qcore.bipartite_entropy(bell(), [2, 2], 1) == pytest.approx(1)
    product = PureState.basis(4, 0)
    assert qcore.bipartite_entropy(product, [2, 2], 1) == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize("cut", [1, 2])
def test_bipartite_entropy_ghz(cut):
    ghz = PureState.from_vector([1, 0, 0, 0, 0, 0, 0, 1])
    assert qcore.bipartite_entropy(ghz, [2, 2, 2], cut) == pytest.approx(1)


@pytest.mark.parametrize("cut", [0, 2])
def test_bipartite_entropy_bad_cut(cut):
    with pytest.raises(ValueError, match="does not split"):
        qcore.bipartite_entropy(bell(), [2, 2], cut)


def test_entropy_and_purity():
    rho = DensityMatrix.maximally_mixed(4)
    assert qcore.von_neumann_entropy(rho) == pytest.approx(2)
    assert qcore.purity(rho) == pytest.approx(0.25)

    pure = PureState.basis(4, 2).projector()
    assert qcore.von_neumann_entropy(pure) == pytest.approx(0, abs=1e-12)
    assert qcore.purity(pure) == pytest.approx(1)


def test_pauli():
    assert qcore.allclose(qcore.pauli("x"), SX, atol=0)
    assert qcore.allclose(qcore.pauli("ZZ"), np.kron(SZ, SZ), atol=0)
    assert qcore.pauli("XYZ").shape == (8, 8)

    with pytest.raises(ValueError, match="Unrecognized Pauli label 'Q'"):
        qcore.pauli("Q")


def test_pauli_returns_a_copy():
    out = qcore.pauli("Z")
    out[0, 0] = 5
    assert qcore.pauli("Z")[0, 0] == 1


def test_embed():
    got = qcore.embed(SZ, 1, 3)
    assert qcore.allclose(got, np.kron(np.kron(np.eye(2), SZ), np.eye(2)), atol=0)
    with pytest.raises(ValueError):
        qcore.embed(SZ, 3, 3)


def test_commutator():
    assert qcore.allclose(qcore.commutator(SZ, SX), 2j * qcore.pauli("Y"), atol=1e-15)


@pytest.mark.parametrize("dim", [1, 2, 5])
def test_random_objects(dim):
    rng = np.random.default_rng(dim)
    assert qcore.hermiticity_error(qcore.random_hermitian(dim, rng)) == 0
    assert qcore.is_unitary(qcore.haar_unitary(dim, rng), tol=1e-10)
    assert qcore.haar_state(dim, rng).dim == dim


def test_haar_unitary_repeatable():
    a = qcore.haar_unitary(3, np.random.default_rng(5))
    b = qcore.haar_unitary(3, np.random.default_rng(5))
    assert qcore.allclose(a, b, atol=0)

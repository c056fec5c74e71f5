#  SPDX-License-Identifier: GPL-3.0-or-later

"""Dense linear algebra and quantum-state types.

Everything in the package is built on NumPy arrays of dtype
``complex128``: there is no separate matrix class, and the helpers
here validate and convert arrays at the boundaries (the state and
Hamiltonian types below). All comparisons take an explicit absolute
tolerance; the fixed tolerances used by the package are

- `STRUCTURAL_TOL` (1e-10) for hermiticity, normalization and trace,
- `UNITARY_TOL` (1e-8) for unitarity checks.

Dimensions are capped at `MAX_DIM` as only dense storage is
supported.

Entropies and information measures are given in bits.

"""

from dataclasses import dataclass
from enum import Enum
import functools
import logging
from typing import Sequence

import numpy as np
import scipy.linalg
from scipy.stats import unitary_group


__all__ = ("STRUCTURAL_TOL", "UNITARY_TOL", "MAX_DIM",
           "DimensionError", "NotHermitianError", "NotUnitaryError",
           "ObjectKind", "PureState", "DensityMatrix", "HamiltonianPair",
           "as_matrix", "dagger", "allclose", "commutator",
           "hermiticity_error", "unitarity_error", "is_unitary",
           "check_hermitian", "check_unitary", "operator_norm",
           "expm_hermitian_scaled", "fidelity_pure", "mixed_state_fidelity",
           "trace_distance",
           "gate_infidelity", "partial_trace", "bipartite_entropy",
           "von_neumann_entropy", "purity", "bures_angle",
           "unitary_distance", "kind_of", "pauli", "embed",
           "random_hermitian", "haar_state", "haar_unitary")


STRUCTURAL_TOL = 1e-10
UNITARY_TOL = 1e-8

MAX_DIM = 1024

logger = logging.getLogger(__name__)


class DimensionError(ValueError):
    """The arguments have inconsistent or unsupported dimensions."""


class NotHermitianError(ValueError):
    """A matrix is not Hermitian.

    The ``norm`` attribute is the Frobenius norm of H - H^dagger.
    """

    def __init__(self, message: str, norm: float) -> None:
        super().__init__(message)
        self.norm = norm


class NotUnitaryError(ValueError):
    """A matrix is not unitary.

    The ``deviation`` attribute is the Frobenius norm of U^dagger U - I.
    """

    def __init__(self, message: str, deviation: float) -> None:
        super().__init__(message)
        self.deviation = deviation


class ObjectKind(Enum):
    """What is being steered: a state vector, a density matrix, or
    the propagator itself."""

    PURE = "pure"
    DENSITY = "density"
    UNITARY = "unitary"

    @classmethod
    def from_name(cls, name: "str | ObjectKind") -> "ObjectKind":
        """Case-insensitive lookup."""

        if isinstance(name, cls):
            return name

        check = str(name).casefold()
        out = next((k for k in cls if k.value == check), None)
        if out is None:
            raise ValueError(f"Unrecognized object kind '{name}'")

        return out


def _check_dim(n: int, label: str) -> None:
    if n < 1:
        raise DimensionError(f"{label} must have at least one element")

    if n > MAX_DIM:
        raise DimensionError(f"{label} has dimension {n} but the "
                             f"maximum supported is {MAX_DIM}")


def as_matrix(a, *, square: bool = True, label: str = "matrix") -> np.ndarray:
    """Return a copy of the input as a 2D complex128 array.

    Parameters
    ----------
    a : array_like
        The matrix.
    square : bool, optional
        Require a square matrix.
    label : str, optional
        Used in error messages.

    Returns
    -------
    out : ndarray
        A new array, so the caller can not change the input.

    """

    out = np.array(a, dtype=np.complex128)
    if out.ndim != 2:
        raise DimensionError(f"{label} must be 2D, not {out.ndim}D")

    nrow, ncol = out.shape
    _check_dim(nrow, label)
    _check_dim(ncol, label)
    if square and nrow != ncol:
        raise DimensionError(f"{label} must be square, not {nrow}x{ncol}")

    return out


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def dagger(a: np.ndarray) -> np.ndarray:
    """The conjugate transpose."""
    return np.conjugate(np.swapaxes(a, -1, -2))


def allclose(a, b, *, atol: float) -> bool:
    """Element-wise comparison with an explicit absolute tolerance.

    There is no relative tolerance and no default: callers must
    say what they mean by "equal".
    """

    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return False

    return bool(np.all(np.abs(a - b) <= atol))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """[a, b] = ab - ba (broadcasts over leading axes)."""
    return a @ b - b @ a


def hermiticity_error(h: np.ndarray) -> float:
    """The Frobenius norm of H - H^dagger."""
    return float(np.linalg.norm(h - dagger(h)))


def unitarity_error(u: np.ndarray) -> float:
    """The Frobenius norm of U^dagger U - I."""
    n = u.shape[0]
    return float(np.linalg.norm(dagger(u) @ u - np.eye(n)))


def is_unitary(u, tol: float = UNITARY_TOL) -> bool:
    """Is the matrix unitary to within tol?"""

    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False

    return unitarity_error(u) <= tol


def check_hermitian(h: np.ndarray, *, tol: float = STRUCTURAL_TOL,
                    label: str = "H") -> None:
    """Raise NotHermitianError unless h is Hermitian within tol."""

    norm = hermiticity_error(h)
    if norm > tol:
        raise NotHermitianError(f"{label} is not Hermitian: "
                                f"||{label} - {label}^dagger|| = {norm:.3e} "
                                f"(tolerance {tol:.0e})", norm)


def check_unitary(u: np.ndarray, *, tol: float = UNITARY_TOL,
                  label: str = "U") -> None:
    """Raise NotUnitaryError unless u is unitary within tol."""

    deviation = unitarity_error(u)
    if deviation > tol:
        raise NotUnitaryError(f"{label} is not unitary: "
                              f"||{label}^dagger {label} - I|| = {deviation:.3e} "
                              f"(tolerance {tol:.0e})", deviation)


def operator_norm(h: np.ndarray) -> float:
    """The largest singular value."""
    return float(np.linalg.norm(h, ord=2))


@dataclass(frozen=True, eq=False)
class PureState:
    """A normalized state vector.

    The amplitudes are copied and made read-only.
    """

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1:
            raise DimensionError(f"state vector must be 1D, not {amps.ndim}D")

        _check_dim(amps.size, "state vector")

        norm = np.linalg.norm(amps)
        if abs(norm - 1) > STRUCTURAL_TOL:
            raise ValueError(f"state vector is not normalized: norm = {norm:.12g}")

        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def from_vector(cls, vector) -> "PureState":
        """Normalize the vector and create the state."""

        vec = np.asarray(vector, dtype=np.complex128)
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ValueError("Unable to normalize the zero vector")

        return cls(vec / norm)

    @classmethod
    def basis(cls, dim: int, index: int) -> "PureState":
        """The computational basis state |index>."""

        if not 0 <= index < dim:
            raise ValueError(f"index={index} is outside [0, {dim - 1}]")

        vec = np.zeros(dim, dtype=np.complex128)
        vec[index] = 1
        return cls(vec)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def projector(self) -> "DensityMatrix":
        """|psi><psi|"""
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A Hermitian, unit-trace, positive semi-definite matrix."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        rho = as_matrix(self.matrix, label="density matrix")
        check_hermitian(rho, label="rho")

        trace = np.trace(rho)
        if abs(trace - 1) > STRUCTURAL_TOL:
            raise ValueError(f"density matrix does not have unit trace: {trace:.12g}")

        lowest = np.linalg.eigvalsh(rho)[0]
        if lowest < -STRUCTURAL_TOL:
            raise ValueError("density matrix is not positive semi-definite: "
                             f"smallest eigenvalue = {lowest:.3e}")

        object.__setattr__(self, "matrix", _frozen(rho))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        """I / N"""
        return cls(np.eye(dim) / dim)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class HamiltonianPair:
    """The drift and control Hamiltonians.

    The evolution is generated by ``drift + gamma(t) * control``.

    """

    drift: np.ndarray
    control: np.ndarray

    def __post_init__(self) -> None:
        drift = as_matrix(self.drift, label="H_D")
        control = as_matrix(self.control, label="H_C")
        if drift.shape != control.shape:
            raise DimensionError(f"H_D is {drift.shape} but H_C is {control.shape}")

        check_hermitian(drift, label="H_D")
        check_hermitian(control, label="H_C")

        object.__setattr__(self, "drift", _frozen(drift))
        object.__setattr__(self, "control", _frozen(control))

    @property
    def dim(self) -> int:
        return self.drift.shape[0]

    def at(self, gamma: float) -> np.ndarray:
        """H_D + gamma H_C"""
        return self.drift + gamma * self.control

    def normalized(self) -> "HamiltonianPair":
        """Rescale each non-zero operator to unit operator norm."""

        def norm1(h):
            scale = operator_norm(h)
            return h if scale == 0 else h / scale

        return HamiltonianPair(norm1(self.drift), norm1(self.control))

    def negated(self) -> "HamiltonianPair":
        """(-H_D, -H_C)"""
        return HamiltonianPair(-self.drift, -self.control)


def kind_of(obj) -> ObjectKind:
    """Is this a state vector, density matrix, or propagator?"""

    if isinstance(obj, PureState):
        return ObjectKind.PURE

    if isinstance(obj, DensityMatrix):
        return ObjectKind.DENSITY

    if isinstance(obj, np.ndarray) and obj.ndim == 2:
        return ObjectKind.UNITARY

    raise TypeError(f"Unsupported quantum object: {type(obj).__name__}")


def expm_hermitian_scaled(h, t: float) -> np.ndarray:
    """Return exp(-i t H) for a Hermitian H.

    Parameters
    ----------
    h : array_like
        A Hermitian matrix.
    t : float
        The (finite) scale factor, normally a time.

    Returns
    -------
    u : ndarray
        The unitary exp(-i t H).

    Raises
    ------
    NotHermitianError
        The ``norm`` attribute contains ||H - H^dagger||.

    Notes
    -----
    This uses the eigen-decomposition H = V diag(lambda) V^dagger, so
    that exp(-i t H) = V diag(exp(-i t lambda)) V^dagger, which is
    unitary to rounding error. General (non-normal) matrices are
    not supported.

    Examples
    --------

    >>> sx = np.asarray([[0, 1], [1, 0]])
    >>> u = expm_hermitian_scaled(sx, np.pi)
    >>> allclose(u, -np.eye(2), atol=1e-12)
    True

    """

    if not np.isfinite(t):
        raise ValueError(f"t must be finite, not {t}")

    hmat = as_matrix(h, label="H")
    check_hermitian(hmat)

    evals, evecs = scipy.linalg.eigh(hmat)
    return (evecs * np.exp(-1j * t * evals)) @ dagger(evecs)


def _check_same_dim(a: int, b: int) -> None:
    if a != b:
        raise DimensionError(f"dimension mismatch: {a} and {b}")


def fidelity_pure(a: PureState, b: PureState) -> float:
    """|<a|b>|^2, in [0, 1]."""

    _check_same_dim(a.dim, b.dim)
    overlap = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    return float(min(1.0, overlap))


def mixed_state_fidelity(a: DensityMatrix, b: DensityMatrix) -> float:
    """The Uhlmann fidelity, (Tr sqrt(sqrt(a) b sqrt(a)))^2.

    It reduces to `fidelity_pure` for pure states.

    Examples
    --------

    >>> f = mixed_state_fidelity(DensityMatrix.maximally_mixed(2),
    ...                          PureState.basis(2, 0).projector())
    >>> round(f, 12)
    0.5

    """

    _check_same_dim(a.dim, b.dim)
    evals, evecs = scipy.linalg.eigh(a.matrix)
    root = (evecs * np.sqrt(np.clip(evals, 0, None))) @ dagger(evecs)
    inner = root @ b.matrix @ root
    evals = np.clip(np.linalg.eigvalsh((inner + dagger(inner)) / 2), 0, None)
    return float(min(1.0, np.sqrt(evals).sum() ** 2))


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """Half the sum of the absolute eigenvalues of a - b."""

    _check_same_dim(a.dim, b.dim)
    diff = a.matrix - b.matrix
    evals = np.linalg.eigvalsh((diff + dagger(diff)) / 2)
    return float(min(1.0, 0.5 * np.abs(evals).sum()))


def gate_infidelity(u, v) -> float:
    """1 - |Tr(U^dagger V)|^2 / N^2.

    This is insensitive to a global phase of either argument.

    Raises
    ------
    NotUnitaryError
        If either argument is not unitary within `UNITARY_TOL`.

    """

    umat = as_matrix(u, label="U")
    vmat = as_matrix(v, label="V")
    _check_same_dim(umat.shape[0], vmat.shape[0])
    check_unitary(umat, label="U")
    check_unitary(vmat, label="V")

    n = umat.shape[0]
    overlap = abs(np.trace(dagger(umat) @ vmat)) ** 2 / n ** 2
    return float(min(1.0, max(0.0, 1 - overlap)))


def _keep_list(keep, nsys: int) -> list[int]:
    if isinstance(keep, (int, np.integer)):
        keep = [int(keep)]

    out = sorted(set(int(k) for k in keep))
    if len(out) == 0:
        raise ValueError("keep must name at least one subsystem")

    for k in out:
        if not 0 <= k < nsys:
            raise ValueError(f"subsystem {k} is outside [0, {nsys - 1}]")

    return out


def partial_trace(rho: DensityMatrix,
                  dims: Sequence[int],
                  keep: int | Sequence[int]
                  ) -> DensityMatrix:
    """Trace out all but the kept subsystems.

    Parameters
    ----------
    rho : DensityMatrix
        The state of the full system.
    dims : sequence of int
        The dimension of each subsystem; their product must equal
        the dimension of rho.
    keep : int or sequence of int
        The subsystems to keep.

    Returns
    -------
    reduced : DensityMatrix

    Examples
    --------

    The reduced state of one half of a Bell pair is maximally mixed:

    >>> bell = PureState.from_vector([1, 0, 0, 1])
    >>> reduced = partial_trace(bell.projector(), [2, 2], 0)
    >>> allclose(reduced.matrix, np.eye(2) / 2, atol=1e-12)
    True

    """

    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims):
        raise DimensionError(f"subsystem dimensions must be positive: {dims}")

    total = int(np.prod(dims))
    if total != rho.dim:
        raise DimensionError(f"product of dims {dims} is {total} but the "
                             f"state has dimension {rho.dim}")

    nsys = len(dims)
    kept = _keep_list(keep, nsys)
    traced = [i for i in range(nsys) if i not in kept]
    perm = kept + traced

    dkeep = int(np.prod([dims[i] for i in kept]))
    drest = total // dkeep

    tensor = rho.matrix.reshape(dims + dims)
    tensor = tensor.transpose(perm + [nsys + i for i in perm])
    tensor = tensor.reshape(dkeep, drest, dkeep, drest)
    reduced = np.einsum("ajbj->ab", tensor)

    # Remove rounding asymmetry before validation.
    #
    return DensityMatrix((reduced + dagger(reduced)) / 2)


def _entropy_bits(probs: np.ndarray) -> float:
    probs = probs[probs > 1e-15]
    return float(max(0.0, -np.sum(probs * np.log2(probs))))


def bipartite_entropy(psi: PureState, dims: Sequence[int], cut: int) -> float:
    """The Von Neumann entropy, in bits, across a cut of the chain.

    Parameters
    ----------
    psi : PureState
    dims : sequence of int
        The subsystem dimensions.
    cut : int
        The first block is ``dims[:cut]`` and the second
        ``dims[cut:]``, so cut must lie in 1 to len(dims) - 1.

    Returns
    -------
    entropy : float
        Bits, in the range 0 to log2 of the smaller block dimension.

    Notes
    -----
    The squared Schmidt coefficients of psi are the non-zero
    eigenvalues of either reduced state, so the value does not depend
    on which block is kept.

    """

    dims = [int(d) for d in dims]
    if not 1 <= cut < len(dims):
        raise ValueError(f"cut={cut} does not split {len(dims)} subsystems "
                         "into two non-empty blocks")

    dleft = int(np.prod(dims[:cut]))
    dright = int(np.prod(dims[cut:]))
    if dleft * dright != psi.dim:
        raise DimensionError(f"product of dims {dims} is {dleft * dright} "
                             f"but the state has dimension {psi.dim}")

    schmidt = np.linalg.svd(psi.amplitudes.reshape(dleft, dright),
                            compute_uv=False)
    entropy = _entropy_bits(schmidt ** 2)
    return min(entropy, float(np.log2(min(dleft, dright))))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """-Tr(rho log2 rho)"""
    return _entropy_bits(np.linalg.eigvalsh(rho.matrix))


def purity(rho: DensityMatrix) -> float:
    """Tr(rho^2)"""
    return float(np.real(np.trace(rho.matrix @ rho.matrix)))


def bures_angle(a: PureState, b: PureState) -> float:
    """arccos(sqrt(F)) for state vectors."""
    return float(np.arccos(np.sqrt(fidelity_pure(a, b))))


def unitary_distance(u, v) -> float:
    """arccos(|Tr(U^dagger V)| / N), the phase-insensitive angle."""

    umat = as_matrix(u, label="U")
    vmat = as_matrix(v, label="V")
    _check_same_dim(umat.shape[0], vmat.shape[0])
    n = umat.shape[0]
    overlap = abs(np.trace(dagger(umat) @ vmat)) / n
    return float(np.arccos(min(1.0, overlap)))


@functools.cache
def _paulis() -> dict[str, np.ndarray]:
    return {"I": np.eye(2, dtype=np.complex128),
            "X": np.asarray([[0, 1], [1, 0]], dtype=np.complex128),
            "Y": np.asarray([[0, -1j], [1j, 0]], dtype=np.complex128),
            "Z": np.asarray([[1, 0], [0, -1]], dtype=np.complex128)}


def pauli(label: str) -> np.ndarray:
    """The Pauli matrix (I, X, Y, or Z), or a tensor product such as 'ZZI'."""

    mats = _paulis()
    try:
        ops = [mats[c] for c in label.upper()]
    except KeyError:
        raise ValueError(f"Unrecognized Pauli label '{label}'") from None

    if len(ops) == 0:
        raise ValueError("Pauli label can not be empty")

    return np.array(functools.reduce(np.kron, ops))


def embed(op: np.ndarray, site: int, nsites: int) -> np.ndarray:
    """Place a single-qubit operator at site (0 based) of an n-qubit chain."""

    if not 0 <= site < nsites:
        raise ValueError(f"site={site} is outside [0, {nsites - 1}]")

    eye = _paulis()["I"]
    ops = [eye] * site + [np.asarray(op)] + [eye] * (nsites - site - 1)
    return functools.reduce(np.kron, ops)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    """A Hermitian matrix drawn from the Gaussian unitary ensemble."""

    _check_dim(dim, "matrix")
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + dagger(a)) / 2


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """A Haar-random unitary."""

    _check_dim(dim, "matrix")
    if dim == 1:
        return np.exp(2j * np.pi * rng.uniform()) * np.ones((1, 1))

    return np.asarray(unitary_group.rvs(dim, random_state=rng),
                      dtype=np.complex128)


def haar_state(dim: int, rng: np.random.Generator) -> PureState:
    """A Haar-random state vector (the first column of a Haar unitary)."""
    return PureState.from_vector(haar_unitary(dim, rng)[:, 0])

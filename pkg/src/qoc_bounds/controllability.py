#  SPDX-License-Identifier: GPL-3.0-or-later

"""The dynamical Lie algebra of a drift and control pair.

The algebra is the smallest real vector space of skew-Hermitian
matrices that contains i H_D and i H_C and is closed under the
commutator. It is built level by level: at each depth the commutators
of the elements added at the previous depth with every earlier
element are orthogonalized against the current basis, using the real
Hilbert-Schmidt inner product Re Tr(A^dagger B), and kept when their
residual norm exceeds the tolerance.

A system is controllable when the algebra contains su(N), that is
when its dimension is at least N^2 - 1.

"""

from dataclasses import dataclass
import logging

import numpy as np

from .qcore import DimensionError, HamiltonianPair, ObjectKind, commutator


__all__ = ("MAX_CLOSURE_DIM", "ClosureNotConvergedError", "LieClosure",
           "lie_closure", "max_algebra_dimension", "reachable_dim",
           "manifold_dim")


# The basis is stored densely as (N^2, N^2) complex values.
#
MAX_CLOSURE_DIM = 16

logger = logging.getLogger(__name__)


class ClosureNotConvergedError(RuntimeError):
    """The closure stopped at the maximum depth while still growing."""


@dataclass(frozen=True, eq=False)
class LieClosure:
    """The orthonormal basis of a dynamical Lie algebra."""

    dim: int
    """The Hilbert-space dimension N."""

    basis: np.ndarray
    """Shape (dimension, N, N): skew-Hermitian, orthonormal."""

    converged: bool
    depth_reached: int
    max_dimension: int
    """The largest possible dimension (N^2 - 1 or N^2)."""

    @property
    def dimension(self) -> int:
        return self.basis.shape[0]

    @property
    def su_dimension(self) -> int:
        """N^2 - 1"""
        return self.dim * self.dim - 1

    @property
    def controllable(self) -> bool:
        """Does the algebra contain su(N)?"""
        return self.dimension >= self.su_dimension


def max_algebra_dimension(h: HamiltonianPair, tol: float = 1e-10) -> int:
    """N^2 - 1 when both generators are traceless, otherwise N^2."""

    n = h.dim
    traced = any(abs(np.trace(m)) / n > tol for m in (h.drift, h.control))
    return n * n if traced else n * n - 1


class _Basis:
    """Grow an orthonormal set of flattened skew-Hermitian matrices."""

    def __init__(self, n: int, capacity: int, tol: float) -> None:
        self.n = n
        self.tol = tol
        self.vectors = np.zeros((capacity, n * n), dtype=np.complex128)
        self.size = 0

    def add(self, candidate: np.ndarray) -> bool:
        """Orthogonalize and append, returning False if dependent."""

        if self.size == self.vectors.shape[0]:
            return False

        vec = candidate.reshape(-1).copy()
        norm = np.linalg.norm(vec)
        if norm <= self.tol:
            return False

        vec /= norm
        current = self.vectors[:self.size]

        # Gram-Schmidt with one re-orthogonalization pass.
        #
        for _ in range(2):
            coeffs = np.real(current.conj() @ vec)
            vec -= coeffs @ current

        residual = np.linalg.norm(vec)
        if residual <= self.tol:
            return False

        self.vectors[self.size] = vec / residual
        self.size += 1
        return True

    def matrix(self, idx: int) -> np.ndarray:
        return self.vectors[idx].reshape(self.n, self.n)

    def matrices(self) -> np.ndarray:
        return self.vectors[:self.size].reshape(self.size, self.n, self.n).copy()


def lie_closure(h: HamiltonianPair,
                tol: float = 1e-10,
                max_depth: int | None = None
                ) -> LieClosure:
    """Compute the dynamical Lie algebra generated by i H_D and i H_C.

    Parameters
    ----------
    h : HamiltonianPair
    tol : float, optional
        Candidates whose (normalized) residual after projection onto
        the current basis is at most tol are discarded. It must lie in
        (0, 1e-6].
    max_depth : int or None, optional
        The maximum number of nested commutators. The default is N^2,
        which is always enough.

    Returns
    -------
    closure : LieClosure
        ``converged`` is False when max_depth was reached while the
        last level still added elements.

    Raises
    ------
    DimensionError
        When N is larger than `MAX_CLOSURE_DIM`.

    Examples
    --------

    >>> from qoc_bounds.qcore import pauli
    >>> lie_closure(HamiltonianPair(pauli("Z"), pauli("X"))).dimension
    3

    """

    if not 0 < tol <= 1e-6:
        raise ValueError(f"tol must be in (0, 1e-6], not {tol}")

    n = h.dim
    if n > MAX_CLOSURE_DIM:
        raise DimensionError("the Lie closure is limited to N <= "
                             f"{MAX_CLOSURE_DIM}, not {n}")

    depth_limit = n * n if max_depth is None else max_depth
    if depth_limit < 1:
        raise ValueError(f"max_depth must be >= 1, not {max_depth}")

    maxdim = max_algebra_dimension(h)
    basis = _Basis(n, n * n, tol)
    for gen in (h.drift, h.control):
        basis.add(1j * gen)

    depth = 0
    frontier = 0
    converged = False
    while True:
        if basis.size >= maxdim:
            converged = True
            break

        if depth >= depth_limit:
            break

        depth += 1
        start = basis.size

        # Pair each element added at the previous depth with every
        # earlier element; pairs of older elements were already used.
        #
        for j in range(frontier, start):
            if basis.size >= maxdim:
                break

            right = basis.matrix(j)
            lefts = basis.vectors[:j].reshape(j, n, n)
            for cand in commutator(lefts, right[None, :, :]):
                basis.add(cand)
                if basis.size >= maxdim:
                    break

        logger.debug("Lie closure depth %d: dimension %d", depth, basis.size)
        if basis.size == start:
            converged = True
            break

        frontier = start

    closure = LieClosure(dim=n, basis=basis.matrices(), converged=converged,
                         depth_reached=depth, max_dimension=maxdim)
    logger.info("Lie closure for N=%d: dimension %d (su(N) is %d), depth %d%s",
                n, closure.dimension, closure.su_dimension, depth,
                "" if converged else ", not converged")
    return closure


def reachable_dim(closure: LieClosure, object_kind: ObjectKind | str) -> int:
    """The reachable-set dimension D_W used by the bounds.

    For a controllable system this is N^2 for density matrices and
    propagators and N for state vectors. Otherwise the dimension of
    the algebra is returned as an estimate and a warning is logged.

    Raises
    ------
    ClosureNotConvergedError

    """

    kind = ObjectKind.from_name(object_kind)
    if not closure.converged:
        raise ClosureNotConvergedError("the Lie closure did not converge "
                                       f"after {closure.depth_reached} levels")

    if closure.controllable:
        n = closure.dim
        return n if kind == ObjectKind.PURE else n * n

    logger.warning("System is sub-controllable: algebra dimension %d < %d",
                   closure.dimension, closure.su_dimension)
    return closure.dimension


def manifold_dim(closure: LieClosure, object_kind: ObjectKind | str) -> int:
    """The real dimension of the reachable manifold.

    This is 2N - 2 for state vectors and N^2 - 1 for density matrices
    (the unitary orbit of a non-degenerate state) or propagators, when
    the system is controllable. Otherwise the algebra dimension is an
    upper bound and is returned.
    """

    kind = ObjectKind.from_name(object_kind)
    if not closure.controllable:
        return closure.dimension

    n = closure.dim
    if kind == ObjectKind.PURE:
        return 2 * n - 2

    return n * n - 1

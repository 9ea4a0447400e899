"""Dense ground-state solver with degeneracy detection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import CapacityError, ContractViolation, InputError
from .hamiltonian import HERMITICITY_TOL, HermitianOperator, hermiticity_error

DEGENERACY_TOL = 1e-9
MAX_SPECTRUM_DIM = 1 << 8


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Normalised ground-state vector of an ``N``-qubit operator.

    ``degeneracy_gap`` is ``E1 - E0``; it is ``inf`` for a one-dimensional
    operator, which has no first excited level.
    """

    amplitudes: np.ndarray
    energy: float
    degeneracy_gap: float
    is_degenerate: bool

    @property
    def n_sites(self) -> int:
        return int(self.amplitudes.shape[0]).bit_length() - 1

    @property
    def sites(self) -> tuple[int, ...]:
        return tuple(range(1, self.n_sites + 1))


def _as_matrix(h_op) -> np.ndarray:
    if isinstance(h_op, HermitianOperator):
        return h_op.matrix
    m = np.asarray(h_op, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractViolation(f"expected a square matrix, got shape {m.shape}")
    if hermiticity_error(m) >= HERMITICITY_TOL:
        raise ContractViolation("operator is not Hermitian")
    return m


def fix_phase(vector: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude entry is real and >= 0.

    Ties in magnitude go to the lowest index (``argmax`` semantics).
    """
    k = int(np.argmax(np.abs(vector)))
    pivot = vector[k]
    if pivot == 0:
        return vector
    out = vector * (abs(pivot) / pivot)
    out[k] = abs(pivot)
    return out


def ground_state(h_op, degeneracy_tol: float = DEGENERACY_TOL) -> QuantumState:
    """Lowest eigenpair of a Hermitian operator by dense LAPACK diagonalisation.

    Only the two lowest eigenvalues are computed (MRRR driver); the second one
    feeds the degeneracy flag.
    """
    if not degeneracy_tol > 0:
        raise InputError(f"degeneracy_tol must be positive, got {degeneracy_tol}")
    m = _as_matrix(h_op)
    dim = m.shape[0]
    if dim == 1:
        return QuantumState(np.ones(1, dtype=complex), float(m[0, 0].real), float("inf"), False)
    w, v = scipy.linalg.eigh(
        m, subset_by_index=[0, 1], driver="evr", check_finite=False
    )
    psi = fix_phase(np.ascontiguousarray(v[:, 0]))
    psi /= np.linalg.norm(psi)
    gap = max(float(w[1] - w[0]), 0.0)
    psi.setflags(write=False)
    return QuantumState(psi, float(w[0]), gap, gap < degeneracy_tol)


def full_spectrum(h_op) -> tuple[np.ndarray, np.ndarray]:
    """All eigenvalues (ascending) and the unitary of eigenvectors, for small operators."""
    m = _as_matrix(h_op)
    if m.shape[0] > MAX_SPECTRUM_DIM:
        raise CapacityError(m.shape[0], MAX_SPECTRUM_DIM)
    w, v = np.linalg.eigh(m)
    return w, v

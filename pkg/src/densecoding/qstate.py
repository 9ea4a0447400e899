"""Density matrices over labelled qubit sites.

A ``DensityMatrix`` carries the ordered labels of the sites it lives on; the
site at position ``p`` of ``sites`` is bit ``p`` of the matrix index.  For a
ground state on sites ``1..N`` this is the same convention as the Hamiltonian.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .eigensolver import QuantumState
from .errors import ContractViolation, InputError
from .hamiltonian import HERMITICITY_TOL, HermitianOperator, hermiticity_error

TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-10
NORM_TOL = 1e-10
ENTROPY_CLAMP = 1e-12
NPT_TOL = 1e-10


class DensityMatrix:
    """Positive, unit-trace Hermitian matrix over ``sites``.

    ``pure=True`` is set by :func:`density_from_pure` and lets entropy and
    positivity checks skip a diagonalisation of what is a rank-1 projector.
    """

    __slots__ = ("_sites", "_matrix", "_pure")

    def __init__(self, matrix, sites: Sequence[int], *, pure: bool = False, validate: bool = True):
        m = np.array(matrix, dtype=complex)
        sites = tuple(int(s) for s in sites)
        if len(set(sites)) != len(sites) or not sites:
            raise InputError(f"site labels must be distinct and nonempty, got {sites}")
        if m.shape != (1 << len(sites),) * 2:
            raise InputError(f"matrix shape {m.shape} does not match {len(sites)} sites")
        if validate:
            _check_density(m, check_spectrum=not pure)
        m.setflags(write=False)
        self._matrix = m
        self._sites = sites
        self._pure = pure

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def sites(self) -> tuple[int, ...]:
        return self._sites

    @property
    def dimension(self) -> int:
        return self._matrix.shape[0]

    @property
    def pure(self) -> bool:
        return self._pure

    def __array__(self, dtype=None, copy=None):
        return self._matrix if dtype is None else self._matrix.astype(dtype)

    def __repr__(self):
        return f"DensityMatrix(sites={self._sites})"


def _check_density(m: np.ndarray, check_spectrum: bool = True) -> None:
    err = hermiticity_error(m)
    if err >= HERMITICITY_TOL:
        raise ContractViolation(f"density matrix not Hermitian (max deviation {err:.3e})")
    tr = np.trace(m).real
    if abs(tr - 1.0) >= TRACE_TOL:
        raise ContractViolation(f"density matrix trace {tr!r} differs from 1")
    if check_spectrum:
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < -POSITIVITY_TOL:
            raise ContractViolation(f"density matrix has negative eigenvalue {lo:.3e}")


def _scatter(values: np.ndarray, positions: Sequence[int]) -> np.ndarray:
    """Spread the bits of ``values`` onto the given bit positions."""
    out = np.zeros(values.shape, dtype=np.int64)
    for k, pos in enumerate(positions):
        out |= ((values >> k) & 1) << pos
    return out


def _split_indices(sites: Sequence[int], keep) -> tuple[tuple[int, ...], np.ndarray]:
    """Kept labels in original order and the (kept, traced) -> full index table."""
    keep = set(int(k) for k in keep)
    if not keep:
        raise InputError("keep set must be nonempty")
    unknown = keep.difference(sites)
    if unknown:
        raise InputError(f"sites {sorted(unknown)} not in {tuple(sites)}")
    kept_pos = [p for p, s in enumerate(sites) if s in keep]
    traced_pos = [p for p, s in enumerate(sites) if s not in keep]
    kept_part = _scatter(np.arange(1 << len(kept_pos)), kept_pos)
    traced_part = _scatter(np.arange(1 << len(traced_pos)), traced_pos)
    table = kept_part[:, None] | traced_part[None, :]
    return tuple(sites[p] for p in kept_pos), table


def density_from_pure(state) -> DensityMatrix:
    """Projector ``|psi><psi|`` of a pure state (QuantumState or raw amplitude vector)."""
    psi = np.asarray(state.amplitudes if isinstance(state, QuantumState) else state, dtype=complex)
    n = psi.shape[0].bit_length() - 1
    if psi.ndim != 1 or psi.shape[0] != 1 << n:
        raise InputError(f"state length {psi.shape} is not a power of two")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) >= NORM_TOL:
        raise ContractViolation(f"state norm {norm!r} differs from 1")
    rho = np.outer(psi, psi.conj())
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho, range(1, n + 1), pure=True)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every site of ``rho`` not in ``keep``; kept sites stay in order."""
    kept, table = _split_indices(rho.sites, keep)
    if len(kept) == len(rho.sites):
        return rho
    m = rho.matrix
    reduced = m[table[:, None, :], table[None, :, :]].sum(axis=2)
    return DensityMatrix(reduced, kept)


def reduced_state(state, keep: Iterable[int]) -> DensityMatrix:
    """Marginal of a pure state without forming the full projector.

    Same bit arithmetic as :func:`partial_trace`; ``rho_K = M M^dag`` with
    ``M[kept, traced] = psi[index]``.
    """
    psi = np.asarray(state.amplitudes if isinstance(state, QuantumState) else state, dtype=complex)
    n = psi.shape[0].bit_length() - 1
    kept, table = _split_indices(tuple(range(1, n + 1)), keep)
    block = psi[table]
    reduced = block @ block.conj().T
    reduced = 0.5 * (reduced + reduced.conj().T)
    return DensityMatrix(reduced, kept, pure=len(kept) == n)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy in bits; eigenvalues at or below 1e-12 contribute nothing."""
    if rho.pure:
        return 0.0
    lam = np.linalg.eigvalsh(rho.matrix)
    if lam[0] < -POSITIVITY_TOL:
        raise ContractViolation(f"negative eigenvalue {lam[0]:.3e} in entropy input")
    lam = lam[lam > ENTROPY_CLAMP]
    s = float(-np.sum(lam * np.log2(lam)))
    return max(s, 0.0)


def partial_transpose(rho: DensityMatrix, transpose_sites: Iterable[int]) -> HermitianOperator:
    """Transpose the tensor factors of ``transpose_sites`` only."""
    chosen = set(int(s) for s in transpose_sites)
    if not chosen or chosen.difference(rho.sites) or len(chosen) == len(rho.sites):
        raise InputError(
            f"transpose sites {sorted(chosen)} must be a nonempty proper subset of {rho.sites}"
        )
    mask = 0
    for p, s in enumerate(rho.sites):
        if s in chosen:
            mask |= 1 << p
    idx = np.arange(rho.dimension)
    rows = idx[:, None]
    cols = idx[None, :]
    src_rows = (rows & ~mask) | (cols & mask)
    src_cols = (cols & ~mask) | (rows & mask)
    return HermitianOperator(rho.matrix[src_rows, src_cols])


def is_npt(rho: DensityMatrix, transpose_sites: Iterable[int], tol: float = NPT_TOL) -> tuple[bool, float]:
    """Negative-partial-transpose verdict and the smallest eigenvalue of the transpose."""
    if not tol > 0:
        raise InputError(f"tol must be positive, got {tol}")
    lo = float(np.linalg.eigvalsh(partial_transpose(rho, transpose_sites).matrix)[0])
    return lo < -tol, lo


def purity(rho: DensityMatrix) -> float:
    m = rho.matrix
    return float(np.real(np.vdot(m.conj().T, m)))

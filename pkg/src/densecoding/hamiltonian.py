"""Spin-chain Hamiltonian with XY two-body and chiral XZY-YZX three-body terms.

Basis convention used throughout the package: site ``n`` (1-based) is bit
``n - 1`` of the basis index, counted from the least significant end, and a
bit value of 0 is spin up (sigma^z = +1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, ContractViolation, InputError

HERMITICITY_TOL = 1e-12
MAX_DENSE_SITES = 14

AXES = ("X", "Y", "Z")


@dataclass(frozen=True)
class SpinChainParams:
    """Couplings of the periodic chain.

    ``j`` is the nearest-neighbour XY strength, ``alpha`` the chiral three-body
    strength (entering as ``j/4 * alpha/2``), ``gamma`` the XX/YY anisotropy
    and ``h`` the transverse field along z.
    """

    n_sites: int
    j: float
    alpha: float
    gamma: float
    h: float

    def __post_init__(self):
        if int(self.n_sites) != self.n_sites or self.n_sites < 3:
            raise InputError(f"n_sites must be an integer >= 3, got {self.n_sites!r}")
        for name in ("j", "alpha", "gamma", "h"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InputError(f"coupling {name} must be finite, got {value!r}")

    def replace(self, **changes) -> "SpinChainParams":
        fields = dict(
            n_sites=self.n_sites, j=self.j, alpha=self.alpha, gamma=self.gamma, h=self.h
        )
        fields.update(changes)
        return SpinChainParams(**fields)


@dataclass(frozen=True)
class PauliString:
    """Product of single-site Pauli matrices times a complex coefficient.

    ``factors`` is a sequence of ``(site, axis)`` with 1-based sites and axis in
    ``"X"``, ``"Y"``, ``"Z"``.
    """

    factors: tuple[tuple[int, str], ...]
    coefficient: complex = 1.0

    def __post_init__(self):
        factors = tuple((int(site), str(axis).upper()) for site, axis in self.factors)
        sites = [site for site, _ in factors]
        if len(set(sites)) != len(sites):
            raise InputError(f"repeated site in Pauli string {factors}")
        for site, axis in factors:
            if site < 1:
                raise InputError(f"site labels are 1-based, got {site}")
            if axis not in AXES:
                raise InputError(f"unknown Pauli axis {axis!r}")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "coefficient", complex(self.coefficient))

    @property
    def max_site(self) -> int:
        return max((site for site, _ in self.factors), default=0)

    def masks(self) -> tuple[int, int, int]:
        """Return (flip mask, Y-site mask, phase mask for Z and Y sign)."""
        flip = ymask = zmask = 0
        for site, axis in self.factors:
            bit = 1 << (site - 1)
            if axis in ("X", "Y"):
                flip |= bit
            if axis == "Y":
                ymask |= bit
            if axis in ("Y", "Z"):
                zmask |= bit
        return flip, ymask, zmask


class HermitianOperator:
    """Immutable complex Hermitian matrix over a qubit computational basis."""

    __slots__ = ("_matrix",)

    def __init__(self, matrix, *, tol: float = HERMITICITY_TOL):
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ContractViolation(f"expected a square matrix, got shape {m.shape}")
        err = hermiticity_error(m)
        if err >= tol:
            raise ContractViolation(f"matrix is not Hermitian (max |H - H^dag| = {err:.3e})")
        m.setflags(write=False)
        self._matrix = m

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dimension(self) -> int:
        return self._matrix.shape[0]

    @property
    def n_qubits(self) -> int:
        return self.dimension.bit_length() - 1

    def __array__(self, dtype=None, copy=None):
        return self._matrix if dtype is None else self._matrix.astype(dtype)

    def __repr__(self):
        return f"HermitianOperator(dimension={self.dimension})"


def hermiticity_error(matrix: np.ndarray) -> float:
    m = np.asarray(matrix)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T)))


def pauli_string_action(p: PauliString, basis_index: int, n_sites: int) -> tuple[int, complex]:
    """Apply ``p`` to basis state ``|basis_index>`` of an ``n_sites`` register.

    Returns ``(result_index, amplitude)`` with ``p|i> = amplitude |result_index>``.
    """
    dim = 1 << n_sites
    if not 0 <= basis_index < dim:
        raise InputError(f"basis index {basis_index} outside [0, {dim})")
    if p.max_site > n_sites:
        raise InputError(f"Pauli string acts on site {p.max_site} > n_sites={n_sites}")
    amplitude = p.coefficient
    for site, axis in p.factors:
        down = (basis_index >> (site - 1)) & 1
        if axis == "Y":
            amplitude *= -1j if down else 1j
        elif axis == "Z" and down:
            amplitude = -amplitude
    flip, _, _ = p.masks()
    return basis_index ^ flip, amplitude


def _pauli_action_all(p: PauliString, n_sites: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised ``pauli_string_action`` over every basis index."""
    idx = np.arange(1 << n_sites, dtype=np.int64)
    flip, ymask, zmask = p.masks()
    n_y = bin(ymask).count("1")
    # Y = i * (X Z) column-wise: sign from Z on the pre-flip bit, i per Y factor.
    parity = np.zeros(idx.shape, dtype=np.int64)
    bits = idx & zmask
    for site, _ in p.factors:
        parity ^= (bits >> (site - 1)) & 1
    amplitude = p.coefficient * (1j**n_y) * (1 - 2 * parity)
    return idx ^ flip, amplitude.astype(complex)


def _check_dimension(n_sites: int, max_sites: int) -> None:
    if n_sites > max_sites:
        raise CapacityError(1 << n_sites, 1 << max_sites)


def assemble_operator(
    terms: Iterable[PauliString], n_sites: int, *, max_sites: int = MAX_DENSE_SITES
) -> HermitianOperator:
    """Sum Pauli strings into a dense matrix by basis-state action."""
    _check_dimension(n_sites, max_sites)
    dim = 1 << n_sites
    mat = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim)
    for term in terms:
        if term.coefficient == 0:
            continue
        rows, amps = _pauli_action_all(term, n_sites)
        mat[rows, cols] += amps
    return HermitianOperator(mat)


def hamiltonian_terms(params: SpinChainParams) -> list[PauliString]:
    """Pauli-string expansion of the chain Hamiltonian with periodic wrap."""
    n = params.n_sites

    def site(k: int) -> int:
        return (k - 1) % n + 1

    pre = -params.j / 4.0
    chiral = pre * params.alpha / 2.0
    terms: list[PauliString] = []
    for k in range(1, n + 1):
        left, mid, right = site(k - 1), k, site(k + 1)
        terms.append(PauliString(((mid, "X"), (right, "X")), pre * (1 + params.gamma)))
        terms.append(PauliString(((mid, "Y"), (right, "Y")), pre * (1 - params.gamma)))
        terms.append(PauliString(((left, "X"), (mid, "Z"), (right, "Y")), chiral))
        terms.append(PauliString(((left, "Y"), (mid, "Z"), (right, "X")), -chiral))
    for k in range(1, n + 1):
        terms.append(PauliString(((k, "Z"),), -params.h / 2.0))
    return terms


def build_hamiltonian(
    params: SpinChainParams, *, max_sites: int = MAX_DENSE_SITES
) -> HermitianOperator:
    """Dense Hamiltonian of the chain over the full ``2**N`` basis.

    Raises CapacityError when ``N`` exceeds ``max_sites``.
    """
    _check_dimension(params.n_sites, max_sites)
    return assemble_operator(hamiltonian_terms(params), params.n_sites, max_sites=max_sites)


def total_sz_operator(n_sites: int, *, max_sites: int = MAX_DENSE_SITES) -> HermitianOperator:
    """Total magnetisation ``sum_n sigma^z_n`` (diagonal)."""
    if n_sites < 1:
        raise InputError(f"n_sites must be >= 1, got {n_sites}")
    _check_dimension(n_sites, max_sites)
    idx = np.arange(1 << n_sites)
    down = np.zeros(idx.shape, dtype=np.int64)
    for b in range(n_sites):
        down += (idx >> b) & 1
    return HermitianOperator(np.diag((n_sites - 2 * down).astype(complex)))


def site_operator(axes: Sequence[tuple[int, str]], n_sites: int) -> HermitianOperator:
    """Convenience: dense matrix of a single Pauli string with unit coefficient."""
    return assemble_operator([PauliString(tuple(axes))], n_sites)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from densecoding.errors import CapacityError, ContractViolation, InputError
from densecoding.hamiltonian import (
    HermitianOperator,
    PauliString,
    SpinChainParams,
    assemble_operator,
    build_hamiltonian,
    hamiltonian_terms,
    hermiticity_error,
    pauli_string_action,
    total_sz_operator,
)

from oracles import kron_hamiltonian, kron_string

couplings = st.floats(-3, 3, allow_nan=False)


class TestPauliAction:
    def test_z_eigenstate(self):
        assert pauli_string_action(PauliString(((1, "Z"),)), 0, 2) == (0, 1)
        assert pauli_string_action(PauliString(((1, "Z"),)), 1, 2) == (1, -1)

    def test_x_flips(self):
        assert pauli_string_action(PauliString(((1, "X"),)), 0, 2) == (1, 1)

    def test_y(self):
        assert pauli_string_action(PauliString(((1, "Y"),)), 0, 2) == (1, 1j)
        assert pauli_string_action(PauliString(((1, "Y"),)), 1, 2) == (0, -1j)

    def test_out_of_range(self):
        with pytest.raises(InputError):
            pauli_string_action(PauliString(((1, "X"),)), 4, 2)
        with pytest.raises(InputError):
            pauli_string_action(PauliString(((1, "X"),)), -1, 2)
        with pytest.raises(InputError):
            pauli_string_action(PauliString(((3, "X"),)), 0, 2)

    def test_repeated_site_rejected(self):
        with pytest.raises(InputError):
            PauliString(((1, "X"), (1, "Z")))

    @pytest.mark.parametrize("axes", ["XZY", "YZX", "XYZ", "ZZX", "YYY"])
    def test_matches_kron_on_every_basis_state(self, axes):
        n = 4
        sites = (4, 1, 2)
        p = PauliString(tuple(zip(sites, axes)), 0.3 - 0.2j)
        ref = p.coefficient * kron_string(dict(zip(sites, axes)), n)
        for i in range(2**n):
            r, amp = pauli_string_action(p, i, n)
            col = ref[:, i]
            assert np.count_nonzero(col) == 1
            assert col[r] == pytest.approx(amp, abs=1e-15)


class TestSpinChainParams:
    def test_needs_three_sites(self):
        with pytest.raises(InputError):
            SpinChainParams(2, 1, 0, 0, 0)

    def test_finite(self):
        with pytest.raises(InputError):
            SpinChainParams(4, float("inf"), 0, 0, 0)
        with pytest.raises(InputError):
            SpinChainParams(4, 1, float("nan"), 0, 0)


class TestBuildHamiltonian:
    def test_field_only(self):
        H = build_hamiltonian(SpinChainParams(3, 0, 0, 0, 1)).matrix
        assert np.count_nonzero(H - np.diag(np.diag(H))) == 0
        diag = np.diag(H).real
        assert diag.min() == pytest.approx(-1.5)
        assert int(np.argmin(diag)) == 0

    def test_xx_ring_ground_energy_matches_kron(self):
        H = build_hamiltonian(SpinChainParams(4, 1, 0, 0, 0))
        ref = kron_hamiltonian(4, 1, 0, 0, 0)
        assert np.linalg.eigvalsh(H.matrix)[0] == pytest.approx(np.linalg.eigvalsh(ref)[0], abs=1e-12)

    def test_n10_dimension_and_hermitian(self):
        H = build_hamiltonian(SpinChainParams(10, 0.7, 1.3, 0.4, 0.2))
        assert H.dimension == 1024
        assert hermiticity_error(H.matrix) < 1e-12

    def test_capacity_limit(self):
        with pytest.raises(CapacityError) as info:
            build_hamiltonian(SpinChainParams(15, 1, 0, 0, 0))
        assert info.value.dimension == 2**15
        with pytest.raises(CapacityError):
            build_hamiltonian(SpinChainParams(6, 1, 0, 0, 0), max_sites=5)

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_matches_kron_construction(self, n):
        args = (1.1, 0.6, 0.7, 0.4)
        H = build_hamiltonian(SpinChainParams(n, *args)).matrix
        assert np.max(np.abs(H - kron_hamiltonian(n, *args))) < 1e-12

    @settings(max_examples=25, deadline=None)
    @given(j=couplings, alpha=couplings, gamma=couplings, h=couplings, n=st.integers(3, 6))
    def test_kron_equivalence_property(self, j, alpha, gamma, h, n):
        H = build_hamiltonian(SpinChainParams(n, j, alpha, gamma, h)).matrix
        assert hermiticity_error(H) < 1e-12
        assert np.max(np.abs(H - kron_hamiltonian(n, j, alpha, gamma, h))) < 1e-12

    @settings(max_examples=20, deadline=None)
    @given(alpha=couplings, gamma=couplings, n=st.integers(3, 7))
    def test_zero_without_j_and_h(self, alpha, gamma, n):
        H = build_hamiltonian(SpinChainParams(n, 0.0, alpha, gamma, 0.0)).matrix
        assert np.count_nonzero(H) == 0

    def test_term_count(self):
        assert len(hamiltonian_terms(SpinChainParams(5, 1, 1, 1, 1))) == 4 * 5 + 5


class TestMagnetisationSymmetry:
    @pytest.mark.parametrize("n", [3, 4, 5, 6, 7, 8])
    def test_gamma_zero_commutes(self, n):
        H = build_hamiltonian(SpinChainParams(n, 1.0, 0.6, 0.0, 0.4)).matrix
        Sz = total_sz_operator(n).matrix
        assert np.max(np.abs(H @ Sz - Sz @ H)) < 1e-10

    @pytest.mark.parametrize("n", [4, 6, 8])
    def test_anisotropy_breaks_it(self, n):
        H = build_hamiltonian(SpinChainParams(n, 1.0, 0.6, 0.7, 0.4)).matrix
        Sz = total_sz_operator(n).matrix
        assert np.max(np.abs(H @ Sz - Sz @ H)) > 1e-6


class TestTotalSz:
    def test_small(self):
        np.testing.assert_array_equal(np.diag(total_sz_operator(1).matrix).real, [1, -1])
        np.testing.assert_array_equal(np.diag(total_sz_operator(2).matrix).real, [2, 0, 0, -2])
        assert total_sz_operator(3).matrix[0, 0] == 3

    def test_invalid(self):
        with pytest.raises(InputError):
            total_sz_operator(0)


class TestHermitianOperator:
    def test_rejects_non_hermitian(self):
        with pytest.raises(ContractViolation):
            HermitianOperator([[0, 1], [0, 0]])

    def test_immutable(self):
        op = HermitianOperator(np.eye(2))
        with pytest.raises(ValueError):
            op.matrix[0, 0] = 3

    def test_assemble_rejects_non_hermitian_sum(self):
        with pytest.raises(ContractViolation):
            assemble_operator([PauliString(((1, "X"),), 1j)], 1)

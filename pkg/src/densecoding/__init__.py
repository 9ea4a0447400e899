"""Dense-coding capacities of a periodic XY chain with chiral three-spin terms."""

from .capacity import (
    CapacityRecord,
    ChannelSpec,
    classical_capacity,
    evaluate_field_average,
    evaluate_point,
    exclusion_capacity,
    field_averaged_capacity,
    multiport_capacity,
    receiver_monogamy_check,
    single_channel_capacity,
)
from .eigensolver import QuantumState, full_spectrum, ground_state
from .errors import CapacityError, ConfigError, ContractViolation, DenseCodingError, InputError
from .hamiltonian import (
    HermitianOperator,
    PauliString,
    SpinChainParams,
    build_hamiltonian,
    pauli_string_action,
    total_sz_operator,
)
from .qstate import (
    DensityMatrix,
    density_from_pure,
    is_npt,
    partial_trace,
    partial_transpose,
    reduced_state,
    von_neumann_entropy,
)
from .sweep import SweepConfig, emit_csv, run_sweep

__version__ = "0.1.0"

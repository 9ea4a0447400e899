"""Normalised dense-coding capacities of chain ground states and their diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .eigensolver import QuantumState, ground_state
from .errors import InputError
from .hamiltonian import SpinChainParams, build_hamiltonian
from .qstate import (
    DensityMatrix,
    density_from_pure,
    is_npt,
    partial_trace,
    reduced_state,
    von_neumann_entropy,
)

QUBIT_DIM = 2
DEFAULT_FIELD_SAMPLES = 100


@dataclass(frozen=True)
class ChannelSpec:
    senders: tuple[int, ...]
    receiver_sites: tuple[int, ...]

    def __post_init__(self):
        senders = tuple(int(s) for s in self.senders)
        receivers = tuple(int(s) for s in self.receiver_sites)
        if not senders or not receivers:
            raise InputError("a channel needs at least one sender and one receiver")
        if set(senders) & set(receivers):
            raise InputError(f"senders {senders} and receivers {receivers} overlap")
        object.__setattr__(self, "senders", senders)
        object.__setattr__(self, "receiver_sites", receivers)

    @property
    def sites(self) -> frozenset[int]:
        return frozenset(self.senders) | frozenset(self.receiver_sites)


def classical_capacity(n_senders: int, n_receivers: int) -> float:
    """Normalised capacity with no quantum advantage, for qubit senders/receivers."""
    return n_senders / (n_senders + n_receivers)


def channel_capacity(rho: DensityMatrix, channel: ChannelSpec) -> float:
    """``(sum log2 d_A + S(rho_B) - S(rho)) / (sum log2 d_A + sum log2 d_B)``.

    ``rho`` must live exactly on the channel's sites.  Not clamped: a value
    outside [0, 1] indicates a bug upstream.
    """
    if set(rho.sites) != channel.sites:
        raise InputError(f"state on sites {rho.sites} does not match channel {channel}")
    log_da = len(channel.senders) * math.log2(QUBIT_DIM)
    log_db = len(channel.receiver_sites) * math.log2(QUBIT_DIM)
    s_b = von_neumann_entropy(partial_trace(rho, channel.receiver_sites))
    s_ab = von_neumann_entropy(rho)
    return (log_da + s_b - s_ab) / (log_da + log_db)


def single_channel_capacity(rho_ab: DensityMatrix, sender: int, receiver: int) -> float:
    if len(rho_ab.sites) != 2:
        raise InputError(f"single channel needs a two-site state, got sites {rho_ab.sites}")
    return channel_capacity(rho_ab, ChannelSpec((sender,), (receiver,)))


def multiport_capacity(rho_full: DensityMatrix, receiver: int) -> float:
    """All sites except ``receiver`` send; ``receiver`` alone receives."""
    if receiver not in rho_full.sites:
        raise InputError(f"receiver {receiver} not in {rho_full.sites}")
    senders = tuple(s for s in rho_full.sites if s != receiver)
    return channel_capacity(rho_full, ChannelSpec(senders, (receiver,)))


def _check_chain_state(ground: QuantumState) -> int:
    n = ground.n_sites
    if n < 3:
        raise InputError(f"need at least 3 sites, state has {n}")
    return n


def pair_capacities(ground: QuantumState, sender: int) -> dict[int, float]:
    """Single-channel capacity from ``sender`` to every other site."""
    n = _check_chain_state(ground)
    if not 1 <= sender <= n:
        raise InputError(f"sender {sender} outside 1..{n}")
    return {
        j: single_channel_capacity(reduced_state(ground, {sender, j}), sender, j)
        for j in range(1, n + 1)
        if j != sender
    }


def exclusion_capacity(ground: QuantumState, sender: int = 1) -> tuple[float, int]:
    """Best single channel with a fixed sender and any one receiver.

    Ties go to the smallest receiver label.
    """
    best_j, best = None, -math.inf
    for j, c in pair_capacities(ground, sender).items():
        if c > best:
            best_j, best = j, c
    return best, best_j


def receiver_monogamy_check(ground: QuantumState, receiver: Optional[int] = None):
    """Compare the summed single channels into ``receiver`` with the multiport capacity.

    Returns ``(lhs < rhs, lhs, rhs)``.  Reported raw; not a general theorem.
    """
    n = _check_chain_state(ground)
    receiver = n if receiver is None else receiver
    lhs = 0.0
    for i in range(1, n + 1):
        if i != receiver:
            lhs += single_channel_capacity(reduced_state(ground, {i, receiver}), i, receiver)
    rhs = multiport_capacity(density_from_pure(ground), receiver)
    return lhs < rhs, lhs, rhs


def field_grid(m: int) -> np.ndarray:
    """``h_i = i/m`` for ``i = 1..m``: equidistant in (0, 1], zero excluded."""
    if m < 1:
        raise InputError(f"m must be >= 1, got {m}")
    return np.arange(1, m + 1) / m


def field_scan(
    params_without_h: SpinChainParams, receiver: Optional[int] = None, m: int = DEFAULT_FIELD_SAMPLES
) -> list[tuple[float, float, bool]]:
    """``(h_i, multiport capacity, degenerate)`` for each field sample, ascending ``i``."""
    receiver = params_without_h.n_sites if receiver is None else receiver
    out = []
    for h in field_grid(m):
        ground = ground_state(build_hamiltonian(params_without_h.replace(h=float(h))))
        c = multiport_capacity(density_from_pure(ground), receiver)
        out.append((float(h), c, ground.is_degenerate))
    return out


def field_averaged_capacity(
    params_without_h: SpinChainParams, receiver: Optional[int] = None, m: int = DEFAULT_FIELD_SAMPLES
) -> float:
    """Mean multiport capacity over ``h_i = i/m``; the ``h`` in params is ignored."""
    values = [c for _, c, _ in field_scan(params_without_h, receiver, m)]
    return sum(values) / m


@dataclass(frozen=True)
class CapacityRecord:
    """One sweep point.

    For field-averaged points ``field_samples`` is set, ``c_multiport`` holds the
    average, ``params.h`` is meaningless and the pair quantities are ``None``;
    ``ground_degenerate`` is then true if any sampled field was degenerate.
    """

    params: SpinChainParams
    c_single_nn: Optional[float]
    c_multiport: Optional[float]
    c_exclusion: Optional[float]
    classical_capacity: float
    npt_nn: Optional[bool]
    ground_degenerate: Optional[bool]
    field_samples: Optional[int] = None
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    @property
    def averaged(self) -> bool:
        return self.field_samples is not None


def evaluate_point(params: SpinChainParams) -> CapacityRecord:
    """Every capacity and flag for the ground state at fixed field.

    Receiver is the last site; the nearest-neighbour channel is sites 1 -> 2.
    """
    n = params.n_sites
    ground = ground_state(build_hamiltonian(params))
    rho_12 = reduced_state(ground, {1, 2})
    c_single = single_channel_capacity(rho_12, 1, 2)
    c_multi = multiport_capacity(density_from_pure(ground), n)
    c_excl, _ = exclusion_capacity(ground, 1)
    npt, _ = is_npt(rho_12, {1})
    return CapacityRecord(
        params=params,
        c_single_nn=c_single,
        c_multiport=c_multi,
        c_exclusion=c_excl,
        classical_capacity=classical_capacity(n - 1, 1),
        npt_nn=npt,
        ground_degenerate=ground.is_degenerate,
    )


def evaluate_field_average(params: SpinChainParams, m: int = DEFAULT_FIELD_SAMPLES) -> CapacityRecord:
    scan = field_scan(params, None, m)
    avg = sum(c for _, c, _ in scan) / m
    return CapacityRecord(
        params=params,
        c_single_nn=None,
        c_multiport=avg,
        c_exclusion=None,
        classical_capacity=classical_capacity(params.n_sites - 1, 1),
        npt_nn=None,
        ground_degenerate=any(d for _, _, d in scan),
        field_samples=m,
    )

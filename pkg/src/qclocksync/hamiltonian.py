"""NMR internal and ideal clock Hamiltonians, and spin-echo refocusing.

Both Hamiltonians are diagonal in the computational basis, so a free
evolution is a per-basis-state phase. A pi rotation about y on qubit ``j``
conjugates ``sigma_z^j`` to ``-sigma_z^j``; in the toggling frame every
delay segment therefore evolves under the internal Hamiltonian with each
``z_j`` replaced by ``s_j z_j``, where ``s_j = +-1`` records the parity of the
pulses applied to ``j`` so far. Summing those signs over segments
(:func:`sign_table`) gives the effective Hamiltonian of a whole sequence
exactly, not only to first order, because all toggled Hamiltonians commute.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.linalg import expm

from .qsim import (
    PAULI_Z,
    RY_PI,
    embed_single_qubit,
    unitary_fidelity_up_to_global_phase,
    z_signs,
)

MAX_DENSE_QUBITS = 8


class ResourceLimitError(RuntimeError):
    """Requested a dense operator beyond :data:`MAX_DENSE_QUBITS`."""


class UnsupportedSequenceError(ValueError):
    """Sequence structure cannot be summarized by a sign table."""


@dataclass(frozen=True, eq=False)
class MoleculeSpec:
    """Chemical shifts (rad/s) and symmetric scalar couplings (Hz)."""

    omega: np.ndarray
    j_coupling: np.ndarray

    def __post_init__(self):
        omega = np.array(self.omega, dtype=float).reshape(-1)
        j = np.array(self.j_coupling, dtype=float)
        n = omega.size
        if n < 1:
            raise ValueError("molecule needs at least one qubit")
        if j.shape != (n, n):
            raise ValueError(f"j_coupling must be {n}x{n}, got {j.shape}")
        if not np.array_equal(j, j.T):
            raise ValueError("j_coupling must be symmetric")
        if np.any(np.diag(j) != 0):
            raise ValueError("j_coupling must have a zero diagonal")
        if not (np.all(np.isfinite(omega)) and np.all(np.isfinite(j))):
            raise ValueError("molecule parameters must be finite")
        omega.flags.writeable = False
        j.flags.writeable = False
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "j_coupling", j)

    @property
    def n(self) -> int:
        return self.omega.size

    @classmethod
    def from_hz(cls, omega_hz, j_hz) -> "MoleculeSpec":
        """Build from shifts in Hz and couplings as a full matrix or an
        upper-triangular list ordered (0,1), (0,2), ..., (1,2), ..."""
        omega_hz = np.asarray(omega_hz, dtype=float).reshape(-1)
        n = omega_hz.size
        j_arr = np.asarray(j_hz, dtype=float)
        if j_arr.ndim == 2:
            j = j_arr
        else:
            pairs = list(combinations(range(n), 2))
            if j_arr.size != len(pairs):
                raise ValueError(
                    f"expected {len(pairs)} upper-triangular couplings for {n} qubits, got {j_arr.size}"
                )
            j = np.zeros((n, n))
            for (a, b), val in zip(pairs, j_arr):
                j[a, b] = j[b, a] = val
        return cls(2 * np.pi * omega_hz, j)


@dataclass(frozen=True, eq=False)
class IdealClockSpec:
    omega: np.ndarray
    standard_index: int = 0

    def __post_init__(self):
        omega = np.array(self.omega, dtype=float).reshape(-1)
        if not 0 <= self.standard_index < omega.size:
            raise ValueError(f"standard_index {self.standard_index} out of range")
        if omega[self.standard_index] != 0.0:
            raise ValueError("the standard clock must have zero frequency")
        omega.flags.writeable = False
        object.__setattr__(self, "omega", omega)

    @property
    def n(self) -> int:
        return self.omega.size

    @classmethod
    def from_molecule(cls, molecule: MoleculeSpec, standard_index: int = 0) -> "IdealClockSpec":
        omega = molecule.omega.copy()
        omega[standard_index] = 0.0
        return cls(omega, standard_index)


def _check_index(n: int, basis_index: int) -> None:
    if not 0 <= basis_index < 2**n:
        raise ValueError(f"basis index {basis_index} out of range for {n} qubits")


def _z_of(n: int, basis_index: int) -> np.ndarray:
    bits = (basis_index >> (n - 1 - np.arange(n))) & 1
    return 1 - 2 * bits


def internal_energy(spec: MoleculeSpec, basis_index: int) -> float:
    """``-sum_j omega_j z_j / 2 + sum_{j<k} (pi/2) J_jk z_j z_k`` for one basis state."""
    _check_index(spec.n, basis_index)
    z = _z_of(spec.n, basis_index)
    energy = -0.5 * float(spec.omega @ z)
    for a, b in combinations(range(spec.n), 2):
        energy += 0.5 * np.pi * spec.j_coupling[a, b] * z[a] * z[b]
    return energy


def internal_energies(spec: MoleculeSpec) -> np.ndarray:
    z = z_signs(spec.n)
    energies = -0.5 * spec.omega @ z
    for a, b in combinations(range(spec.n), 2):
        energies = energies + 0.5 * np.pi * spec.j_coupling[a, b] * z[a] * z[b]
    return energies


def ideal_energy(spec: IdealClockSpec, basis_index: int) -> float:
    """``+sum_{j != standard} omega_j z_j / 2`` for one basis state."""
    _check_index(spec.n, basis_index)
    z = _z_of(spec.n, basis_index)
    mask = np.arange(spec.n) != spec.standard_index
    return 0.5 * float(spec.omega[mask] @ z[mask])


def ideal_energies(spec: IdealClockSpec) -> np.ndarray:
    z = z_signs(spec.n)
    mask = np.arange(spec.n) != spec.standard_index
    return 0.5 * spec.omega[mask] @ z[mask]


def _check_dense(n: int) -> None:
    if n > MAX_DENSE_QUBITS:
        raise ResourceLimitError(f"dense operators limited to {MAX_DENSE_QUBITS} qubits, got {n}")


# Dense Pauli-sum constructions. These deliberately avoid the energy
# bookkeeping above and serve as the independent reference.


def dense_internal_hamiltonian(spec: MoleculeSpec) -> np.ndarray:
    _check_dense(spec.n)
    h = sum(-0.5 * spec.omega[j] * embed_single_qubit(spec.n, {j: PAULI_Z}) for j in range(spec.n))
    for a, b in combinations(range(spec.n), 2):
        h = h + 0.5 * np.pi * spec.j_coupling[a, b] * embed_single_qubit(
            spec.n, {a: PAULI_Z, b: PAULI_Z}
        )
    return h


def dense_ideal_hamiltonian(spec: IdealClockSpec) -> np.ndarray:
    _check_dense(spec.n)
    return sum(
        0.5 * spec.omega[j] * embed_single_qubit(spec.n, {j: PAULI_Z})
        for j in range(spec.n)
        if j != spec.standard_index
    )


def ideal_unitary(spec: IdealClockSpec, delta: float) -> np.ndarray:
    """Dense ``exp(-i H_ideal delta)`` via a general matrix exponential."""
    return expm(-1j * dense_ideal_hamiltonian(spec) * delta)


# -- echo sequences --------------------------------------------------------


@dataclass(frozen=True)
class Pulse:
    """Simultaneous pi rotations about y on ``qubits``."""

    qubits: frozenset

    def __init__(self, qubits):
        object.__setattr__(self, "qubits", frozenset(int(q) for q in qubits))


@dataclass(frozen=True)
class Delay:
    duration: float

    def __post_init__(self):
        if not self.duration >= 0:
            raise ValueError(f"delay duration must be >= 0, got {self.duration!r}")


@dataclass(frozen=True)
class EchoSequence:
    """Pulses and delays listed in the order they happen in time."""

    num_qubits: int
    events: tuple

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        for ev in self.events:
            if isinstance(ev, Pulse):
                if any(not 0 <= q < self.num_qubits for q in ev.qubits):
                    raise ValueError(f"pulse {sorted(ev.qubits)} addresses a missing qubit")
            elif not isinstance(ev, Delay):
                raise TypeError(f"unexpected event {ev!r}")

    @property
    def total_delay(self) -> float:
        return sum(ev.duration for ev in self.events if isinstance(ev, Delay))

    @property
    def pulses(self) -> list[Pulse]:
        return [ev for ev in self.events if isinstance(ev, Pulse)]

    @property
    def delays(self) -> list[Delay]:
        return [ev for ev in self.events if isinstance(ev, Delay)]


# Pulse groups of the published four-qubit echo, written left to right as an
# operator product (qubits 0-based). Eight delays of delta/4 sit between them.
PUBLISHED_ECHO_PULSES = (
    (1, 3), (2,), (3,), (1, 3), (0,), (1, 3), (3,), (2, 0), (1, 3),
)


def build_paper_echo_sequence(delta: float, convention: str = "operator") -> EchoSequence:
    """Transcribe the published four-qubit refocusing product.

    ``convention="operator"`` reads the product right to left (rightmost factor
    first in time). ``convention="diagram"`` reads it left to right like a
    pulse-sequence drawing.
    """
    if delta < 0:
        raise ValueError(f"delta must be >= 0, got {delta!r}")
    if convention == "operator":
        groups = PUBLISHED_ECHO_PULSES[::-1]
    elif convention == "diagram":
        groups = PUBLISHED_ECHO_PULSES
    else:
        raise ValueError(f"unknown convention {convention!r}")
    events = [Pulse(groups[0])]
    for group in groups[1:]:
        events += [Delay(delta / 4), Pulse(group)]
    return EchoSequence(4, events)


def _pulse_unitary(n: int, qubits) -> np.ndarray:
    return embed_single_qubit(n, {q: RY_PI for q in qubits})


def sequence_unitary(seq: EchoSequence, molecule: MoleculeSpec) -> np.ndarray:
    """Dense product of every pulse and delay of ``seq`` in time order."""
    if seq.num_qubits != molecule.n:
        raise ValueError(f"sequence has {seq.num_qubits} qubits, molecule {molecule.n}")
    _check_dense(molecule.n)
    energies = internal_energies(molecule)
    u = np.eye(2**molecule.n, dtype=complex)
    for ev in seq.events:
        if isinstance(ev, Pulse):
            u = _pulse_unitary(molecule.n, ev.qubits) @ u
        else:
            u = np.exp(-1j * energies * ev.duration)[:, None] * u
    return u


@dataclass(frozen=True, eq=False)
class SignTable:
    """Toggling-frame sign sums of a pulse / equal-delay sequence.

    ``per_pair_sums[j, j]`` equals ``segment_count``.
    """

    per_qubit_sums: np.ndarray
    per_pair_sums: np.ndarray
    segment_count: int
    segment_duration: float
    pulse_counts: tuple

    @property
    def num_qubits(self) -> int:
        return len(self.per_qubit_sums)

    @property
    def residual_flips(self) -> tuple:
        """Qubits left inverted at the end of the sequence (odd pulse count)."""
        return tuple(q for q, c in enumerate(self.pulse_counts) if c % 2)

    def effective_phases(self, molecule: MoleculeSpec) -> np.ndarray:
        """Accumulated phase per basis state over all delay segments."""
        n = self.num_qubits
        z = z_signs(n)
        h = -0.5 * (molecule.omega * self.per_qubit_sums) @ z
        for a, b in combinations(range(n), 2):
            h = h + 0.5 * np.pi * molecule.j_coupling[a, b] * self.per_pair_sums[a, b] * z[a] * z[b]
        return h * self.segment_duration

    def residual_pulse_unitary(self) -> np.ndarray:
        _check_dense(self.num_qubits)
        powers = {q: np.linalg.matrix_power(RY_PI, c % 4) for q, c in enumerate(self.pulse_counts)}
        return embed_single_qubit(self.num_qubits, powers)

    def predicted_unitary(self, molecule: MoleculeSpec) -> np.ndarray:
        """Sequence unitary reconstructed from the sign sums alone."""
        phases = np.exp(-1j * self.effective_phases(molecule))
        return self.residual_pulse_unitary() * phases[None, :]

    def unbalanced_pairs(self) -> list[tuple[int, int, int]]:
        n = self.num_qubits
        return [
            (a, b, int(self.per_pair_sums[a, b]))
            for a, b in combinations(range(n), 2)
            if self.per_pair_sums[a, b] != 0
        ]


def sign_table(seq: EchoSequence) -> SignTable:
    n = seq.num_qubits
    signs = np.ones(n, dtype=np.int64)
    counts = np.zeros(n, dtype=np.int64)
    segments = []
    durations = []
    for ev in seq.events:
        if isinstance(ev, Pulse):
            for q in ev.qubits:
                signs[q] *= -1
                counts[q] += 1
        else:
            segments.append(signs.copy())
            durations.append(ev.duration)
    if durations and not np.allclose(durations, durations[0], rtol=1e-12, atol=0.0):
        raise UnsupportedSequenceError("sign tables need equal delay durations")
    rows = np.array(segments, dtype=np.int64).reshape(len(segments), n)
    return SignTable(
        per_qubit_sums=rows.sum(axis=0),
        per_pair_sums=rows.T @ rows,
        segment_count=len(segments),
        segment_duration=float(durations[0]) if durations else 0.0,
        pulse_counts=tuple(int(c) for c in counts),
    )


# -- designed refocusing ---------------------------------------------------

# Symmetric order-4 Hadamard matrix 2I - J: orthogonal rows, each summing to -2.
_HADAMARD_4 = 2 * np.eye(4, dtype=np.int64) - np.ones((4, 4), dtype=np.int64)


def refocusing_signs(n: int, standard_index: int = 0) -> np.ndarray:
    """Toggling-frame sign matrix, shape ``(n, segments)``, for an echo that
    keeps every non-standard shift with a common flipped sign and removes the
    standard shift and all couplings.

    The non-standard rows are Kronecker powers of an order-4 Hadamard matrix,
    so they are mutually orthogonal with row sums ``-2**levels``. A closing
    factor ``(1, 1)`` versus ``(1, -1)`` keeps them orthogonal to the
    balanced standard row. Four non-standard qubits fit in 8 segments; each
    further factor of four needs another Kronecker level.
    """
    if n < 2:
        raise ValueError(f"need at least 2 qubits, got {n}")
    if not 0 <= standard_index < n:
        raise ValueError(f"standard_index {standard_index} out of range for {n} qubits")
    others = n - 1
    levels = 1
    while 4**levels < others:
        levels += 1
    block = np.ones((1, 1), dtype=np.int64)
    for _ in range(levels):
        block = np.kron(block, _HADAMARD_4)
    block *= (-1) ** (levels + 1)
    rows = np.kron(block[:others], np.array([[1, 1]]))
    standard_row = np.kron(np.ones(4**levels, dtype=np.int64), np.array([1, -1]))
    return np.insert(rows, standard_index, standard_row, axis=0)


def sequence_from_signs(signs: np.ndarray, segment_duration: float) -> EchoSequence:
    """Pulse schedule realizing a toggling-frame sign matrix.

    Opening and closing pulses bring every qubit back to its initial frame,
    so each qubit receives an even number of pulses.
    """
    signs = np.asarray(signs)
    n, m = signs.shape
    frame = np.ones(n, dtype=signs.dtype)
    events = []
    for i in range(m):
        flips = np.flatnonzero(frame != signs[:, i])
        if flips.size:
            events.append(Pulse(flips))
        frame = signs[:, i]
        events.append(Delay(segment_duration))
    closing = np.flatnonzero(frame != 1)
    if closing.size:
        events.append(Pulse(closing))
    return EchoSequence(n, events)


def design_refocusing_sequence(n: int, standard_index: int, delta: float) -> EchoSequence:
    """Echo schedule whose net evolution is the ideal clock evolution for ``delta``.

    Works for any molecule whose non-standard shifts match the ideal clock
    frequencies; the standard shift and all couplings are refocused. Total
    free-evolution time is ``2 * delta`` for up to five qubits and grows by a
    factor of two per extra Kronecker level beyond that.
    """
    if delta < 0:
        raise ValueError(f"delta must be >= 0, got {delta!r}")
    signs = refocusing_signs(n, standard_index)
    kept = -int(np.delete(signs, standard_index, axis=0)[0].sum())
    return sequence_from_signs(signs, delta / kept)


@dataclass(frozen=True, eq=False)
class EchoReport:
    fidelity: float
    residual_report: SignTable


def verify_echo(
    seq: EchoSequence, molecule: MoleculeSpec, ideal: IdealClockSpec, delta: float
) -> EchoReport:
    if not seq.num_qubits == molecule.n == ideal.n:
        raise ValueError("sequence, molecule and ideal spec disagree on qubit count")
    u = sequence_unitary(seq, molecule)
    fidelity = unitary_fidelity_up_to_global_phase(u, ideal_unitary(ideal, delta))
    return EchoReport(fidelity, sign_table(seq))

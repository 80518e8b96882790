"""Exact pure-state simulation primitives.

Conventions used across the package:

* qubit 0 is the most significant bit of a basis index, i.e. the leftmost
  character of a ket label such as ``|1000>``;
* ``sigma_z |0> = +|0>`` and ``sigma_z |1> = -|1>``;
* time evolution is ``exp(-i H t)``.

States are immutable: every operation returns a new :class:`StateVector`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

STATE_ATOL = 1e-12
UNITARY_ATOL = 1e-10

# exp(-i pi Y / 2)
RY_PI = np.array([[0.0, -1.0], [1.0, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitudes over the ``2**num_qubits`` computational basis."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        dim = amps.size
        if dim < 2 or dim & (dim - 1):
            raise ValueError(f"amplitude count must be a power of two >= 2, got {dim}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"state is not normalized (norm={norm!r})")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def num_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def allclose(self, other: "StateVector", atol: float = STATE_ATOL) -> bool:
        return np.allclose(self.amplitudes, other.amplitudes, rtol=0.0, atol=atol)

    @classmethod
    def basis(cls, num_qubits: int, index: int) -> "StateVector":
        if not 0 <= index < 2**num_qubits:
            raise ValueError(f"basis index {index} out of range for {num_qubits} qubits")
        amps = np.zeros(2**num_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    @classmethod
    def from_label(cls, label: str) -> "StateVector":
        """Product state from a ket label over ``0``, ``1``, ``+`` and ``-``."""
        single = {
            "0": np.array([1.0, 0.0]),
            "1": np.array([0.0, 1.0]),
            "+": np.array([1.0, 1.0]) / np.sqrt(2),
            "-": np.array([1.0, -1.0]) / np.sqrt(2),
        }
        amps = np.ones(1, dtype=complex)
        for ch in label:
            if ch not in single:
                raise ValueError(f"unknown ket label character {ch!r}")
            amps = np.kron(amps, single[ch])
        return cls(amps)


def _check_qubit(num_qubits: int, qubit: int) -> None:
    if not 0 <= qubit < num_qubits:
        raise ValueError(f"qubit index {qubit} out of range for {num_qubits} qubits")


def z_signs(num_qubits: int) -> np.ndarray:
    """Eigenvalues of ``sigma_z`` on each qubit for every basis index.

    Returns an integer array of shape ``(num_qubits, 2**num_qubits)`` whose
    entry ``[j, b]`` is ``+1`` if qubit ``j`` of basis state ``b`` is 0 and
    ``-1`` otherwise.
    """
    idx = np.arange(2**num_qubits)
    shifts = num_qubits - 1 - np.arange(num_qubits)
    bits = (idx[None, :] >> shifts[:, None]) & 1
    return 1 - 2 * bits


def _split(amps: np.ndarray, num_qubits: int, qubit: int) -> np.ndarray:
    return amps.reshape(2**qubit, 2, 2 ** (num_qubits - qubit - 1))


def apply_single_qubit(state: StateVector, qubit: int, gate: np.ndarray) -> StateVector:
    n = state.num_qubits
    _check_qubit(n, qubit)
    psi = _split(state.amplitudes, n, qubit)
    out = np.einsum("ab,ibj->iaj", gate, psi)
    return StateVector(out.reshape(-1))


def apply_ry_pi(state: StateVector, qubit: int) -> StateVector:
    """Rotate ``qubit`` by pi about the y axis."""
    return apply_single_qubit(state, qubit, RY_PI)


def apply_diagonal_evolution(state: StateVector, energies, t: float) -> StateVector:
    """Evolve under a diagonal Hamiltonian given by its per-basis-state energies."""
    energies = np.asarray(energies, dtype=float)
    if energies.shape != (state.dim,):
        raise ValueError(
            f"expected {state.dim} energies for {state.num_qubits} qubits, got shape {energies.shape}"
        )
    return StateVector(state.amplitudes * np.exp(-1j * energies * t))


def apply_phase_rotation(state: StateVector, qubit: int, angle: float) -> StateVector:
    """Apply ``exp(-i angle sigma_z / 2)`` to ``qubit``.

    Equivalent to evolving for time ``t`` under ``(omega / 2) sigma_z`` with
    ``angle = omega * t``.
    """
    _check_qubit(state.num_qubits, qubit)
    if not np.isfinite(angle):
        raise ValueError(f"angle must be finite, got {angle!r}")
    energies = 0.5 * angle * z_signs(state.num_qubits)[qubit]
    return apply_diagonal_evolution(state, energies, 1.0)


# -- dense operators -------------------------------------------------------


def embed_single_qubit(num_qubits: int, ops: dict[int, np.ndarray]) -> np.ndarray:
    """Kronecker product placing ``ops[q]`` on qubit ``q`` and identity elsewhere."""
    for q in ops:
        _check_qubit(num_qubits, q)
    out = np.ones((1, 1), dtype=complex)
    for q in range(num_qubits):
        out = np.kron(out, ops.get(q, IDENTITY_2))
    return out


def ry_pi_unitary(num_qubits: int, qubits) -> np.ndarray:
    return embed_single_qubit(num_qubits, {q: RY_PI for q in qubits})


def is_unitary(u: np.ndarray, atol: float = UNITARY_ATOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= atol)


def compose(unitaries: Sequence[np.ndarray]) -> np.ndarray:
    """Operator product of ``unitaries`` as written, so the last one acts first."""
    if len(unitaries) == 0:
        raise ValueError("cannot compose an empty sequence")
    dim = np.asarray(unitaries[0]).shape[0]
    out = np.eye(dim, dtype=complex)
    for u in unitaries:
        u = np.asarray(u, dtype=complex)
        if u.shape != (dim, dim):
            raise ValueError(f"dimension mismatch: expected {(dim, dim)}, got {u.shape}")
        out = out @ u
    return out


def unitary_fidelity_up_to_global_phase(u: np.ndarray, v: np.ndarray) -> float:
    """``|tr(U^dagger V)| / d``; equals 1 exactly when ``U = exp(i phi) V``."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return min(1.0, float(abs(np.trace(u.conj().T @ v)) / u.shape[0]))

"""Measure / broadcast / measure clock synchronization runs.

The standard clock measures its qubit in the dual (pos/neg) basis at its
local ``t = 0`` and announces the outcome. Every other party ``j`` reaches its
own ``t = 0`` a time ``delta_j`` later, during which its qubit precesses by
``omega_j * delta_j`` under ``(omega_j / 2) sigma_z``; it then measures in the
dual basis too. Conditional outcome statistics carry the offsets.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .qsim import StateVector, apply_phase_rotation
from .states import EntangledStateKind

ZERO_PROBABILITY = 1e-15


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PartyConfig:
    index: int
    omega: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.omega) and self.omega >= 0):
            raise ConfigError(f"party {self.index}: omega must be finite and >= 0, got {self.omega!r}")
        if not np.isfinite(self.delta):
            raise ConfigError(f"party {self.index}: delta must be finite, got {self.delta!r}")


@dataclass(frozen=True)
class ProtocolConfig:
    state_kind: EntangledStateKind
    parties: tuple
    standard_index: int = 0

    def __post_init__(self):
        parties = tuple(sorted(self.parties, key=lambda p: p.index))
        object.__setattr__(self, "parties", parties)
        n = self.state_kind.n
        if [p.index for p in parties] != list(range(n)):
            raise ConfigError(
                f"{self.state_kind.label} needs exactly one party per qubit 0..{n - 1}, "
                f"got indices {[p.index for p in parties]}"
            )
        if not 0 <= self.standard_index < n:
            raise ConfigError(f"standard_index {self.standard_index} out of range")
        std = parties[self.standard_index]
        if std.omega != 0 or std.delta != 0:
            raise ConfigError("the standard party must have omega = 0 and delta = 0")

    @classmethod
    def uniform(
        cls, kind: EntangledStateKind, omega: float, delta: float, standard_index: int = 0
    ) -> "ProtocolConfig":
        """Every non-standard party shares the same frequency and offset."""
        parties = [
            PartyConfig(i) if i == standard_index else PartyConfig(i, omega, delta)
            for i in range(kind.n)
        ]
        return cls(kind, tuple(parties), standard_index)

    @classmethod
    def from_lists(
        cls, kind: EntangledStateKind, omegas: Sequence[float], deltas: Sequence[float],
        standard_index: int = 0,
    ) -> "ProtocolConfig":
        if len(omegas) != kind.n or len(deltas) != kind.n:
            raise ConfigError(f"need {kind.n} frequencies and offsets")
        parties = [PartyConfig(i, float(w), float(d)) for i, (w, d) in enumerate(zip(omegas, deltas))]
        return cls(kind, tuple(parties), standard_index)

    @property
    def others(self) -> list[PartyConfig]:
        return [p for p in self.parties if p.index != self.standard_index]

    def with_delta(self, delta: float) -> "ProtocolConfig":
        parties = tuple(
            p if p.index == self.standard_index else replace(p, delta=delta) for p in self.parties
        )
        return replace(self, parties=parties)


@dataclass(frozen=True, eq=False)
class DualMeasurement:
    """Outcome probabilities and post-measurement states.

    A collapsed state is ``None`` when its branch has zero probability.
    """

    p_pos: float
    p_neg: float
    collapsed_pos: StateVector | None
    collapsed_neg: StateVector | None


def measure_dual_basis(state: StateVector, qubit: int) -> DualMeasurement:
    n = state.num_qubits
    if not 0 <= qubit < n:
        raise ValueError(f"qubit index {qubit} out of range for {n} qubits")
    psi = state.amplitudes.reshape(2**qubit, 2, -1)
    results = {}
    for name, sign in (("pos", 1.0), ("neg", -1.0)):
        c = (psi[:, 0, :] + sign * psi[:, 1, :]) / np.sqrt(2)
        p = float(np.sum(np.abs(c) ** 2))
        if p <= ZERO_PROBABILITY:
            results[name] = (0.0, None)
            continue
        out = np.empty_like(psi)
        out[:, 0, :] = c / np.sqrt(2)
        out[:, 1, :] = sign * c / np.sqrt(2)
        results[name] = (p, StateVector(out.reshape(-1) / np.sqrt(p)))
    (p_pos, pos_state), (p_neg, neg_state) = results["pos"], results["neg"]
    return DualMeasurement(p_pos, p_neg, pos_state, neg_state)


@dataclass(frozen=True, eq=False)
class ConditionalOutcomeTable:
    """``P(pos on j | standard outcome)`` for every non-standard party ``j``.

    ``conditionals[j]`` holds ``(P(pos | standard pos), P(pos | standard neg))``;
    an entry is ``nan`` when that standard outcome cannot occur.
    """

    config: ProtocolConfig
    p_standard_pos: float
    conditionals: dict = field(default_factory=dict)

    @property
    def parties(self) -> list[int]:
        return sorted(self.conditionals)

    def p_pos(self, party: int, given: str = "pos") -> float:
        return self.conditionals[party][_branch(given)]

    def p_neg(self, party: int, given: str = "pos") -> float:
        return 1.0 - self.p_pos(party, given)


def _branch(given: str) -> int:
    if given not in ("pos", "neg"):
        raise ValueError(f"standard outcome must be 'pos' or 'neg', got {given!r}")
    return 0 if given == "pos" else 1


def run_protocol_exact(config: ProtocolConfig) -> ConditionalOutcomeTable:
    state = config.state_kind.prepare()
    first = measure_dual_basis(state, config.standard_index)
    cond = {p.index: [np.nan, np.nan] for p in config.others}
    for b, branch in enumerate((first.collapsed_pos, first.collapsed_neg)):
        if branch is None:
            continue
        for party in config.others:
            branch = apply_phase_rotation(branch, party.index, party.omega * party.delta)
        for party in config.others:
            cond[party.index][b] = measure_dual_basis(branch, party.index).p_pos
    return ConditionalOutcomeTable(
        config, first.p_pos, {j: tuple(v) for j, v in cond.items()}
    )


def cosine_amplitude(kind: EntangledStateKind) -> Fraction:
    """Amplitude of the ``cos(omega delta)`` term in ``P(pos | standard pos)``."""
    if kind.family == "bell":
        return Fraction(1, 2)
    n, k = kind.n, kind.k
    return Fraction(k * (n - k), n * (n - 1))


def analytic_probability(kind: EntangledStateKind, omega: float, delta: float) -> float:
    """Closed-form ``P(pos | standard pos)`` for a party at ``(omega, delta)``."""
    if kind.family == "bell":
        return 0.5 * (1.0 + np.cos(omega * delta))
    return 0.5 + float(cosine_amplitude(kind)) * np.cos(omega * delta)


def sweep(config: ProtocolConfig, deltas: Sequence[float]) -> list[ConditionalOutcomeTable]:
    """Exact tables with every non-standard offset set to each value in turn."""
    if len(deltas) == 0:
        raise ValueError("deltas must be nonempty")
    return [run_protocol_exact(config.with_delta(float(d))) for d in deltas]


@dataclass(frozen=True, eq=False)
class ShotRecord:
    """Per-party outcome counts split by the announced standard outcome.

    ``party_counts[j][s, o]`` counts shots with standard outcome ``s`` and
    party outcome ``o`` (index 0 = pos, 1 = neg).
    """

    shots: int
    seed: object
    standard_counts: tuple
    party_counts: dict

    def conditional_p_pos(self, party: int, given: str = "pos") -> float:
        row = self.party_counts[party][_branch(given)]
        total = row.sum()
        return float(row[0] / total) if total else float("nan")

    def pooled_p_pos(self, party: int) -> float:
        """Fraction of shots where the party agrees with the announced outcome.

        Estimates ``P(pos | standard pos)`` from every shot for registers where
        the neg-conditioned statistics mirror the pos-conditioned ones.
        """
        c = self.party_counts[party]
        return float((c[0, 0] + c[1, 1]) / self.shots)


def sample_shots(table: ConditionalOutcomeTable, shots: int, seed) -> ShotRecord:
    """Draw finite-shot counts from an exact table.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts. Each party's
    counts follow its exact marginal given the standard outcome.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rng = np.random.default_rng(seed)
    n_pos = int(rng.binomial(shots, min(max(table.p_standard_pos, 0.0), 1.0)))
    branch_sizes = (n_pos, shots - n_pos)
    party_counts = {}
    for j in table.parties:
        counts = np.zeros((2, 2), dtype=np.int64)
        for b, size in enumerate(branch_sizes):
            if size == 0:
                continue
            p = min(max(table.conditionals[j][b], 0.0), 1.0)
            k = int(rng.binomial(size, p))
            counts[b] = (k, size - k)
        party_counts[j] = counts
    return ShotRecord(shots, seed, branch_sizes, party_counts)

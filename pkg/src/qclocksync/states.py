"""Entangled clock-register states and the dual measurement basis."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .qsim import StateVector

POS = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2)
NEG = np.array([1.0, -1.0], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True)
class EntangledStateKind:
    """Which initial register a protocol run starts from.

    Use the :meth:`bell`, :meth:`w` and :meth:`dicke` constructors rather than
    building instances directly.
    """

    family: str
    n: int
    k: int = 1

    def __post_init__(self):
        if self.family == "bell":
            if self.n != 2 or self.k != 1:
                raise ValueError("a Bell register has exactly 2 qubits")
        elif self.family == "w":
            if self.n < 2 or self.k != 1:
                raise ValueError(f"W state needs n >= 2, got n={self.n}")
        elif self.family == "dicke":
            if self.n < 2 or not 1 <= self.k <= self.n - 1:
                raise ValueError(f"Dicke state needs 1 <= k <= n-1, got n={self.n}, k={self.k}")
        else:
            raise ValueError(f"unknown state family {self.family!r}")

    @classmethod
    def bell(cls) -> "EntangledStateKind":
        return cls("bell", 2)

    @classmethod
    def w(cls, n: int) -> "EntangledStateKind":
        return cls("w", n)

    @classmethod
    def dicke(cls, n: int, k: int) -> "EntangledStateKind":
        return cls("dicke", n, k)

    @property
    def label(self) -> str:
        if self.family == "bell":
            return "Bell"
        if self.family == "w":
            return f"W({self.n})"
        return f"Dicke({self.n},{self.k})"

    def prepare(self) -> StateVector:
        if self.family == "bell":
            return prepare_bell()
        if self.family == "w":
            return prepare_w(self.n)
        return prepare_dicke(self.n, self.k)


def hamming_weight_states(n: int, k: int) -> list[int]:
    """Increasing list of the n-bit basis indices with exactly ``k`` ones."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    indices = [sum(1 << (n - 1 - q) for q in ones) for ones in combinations(range(n), k)]
    return sorted(indices)


def _uniform_superposition(n: int, support: list[int]) -> StateVector:
    amps = np.zeros(2**n, dtype=complex)
    amps[support] = 1.0 / np.sqrt(len(support))
    return StateVector(amps)


def prepare_bell() -> StateVector:
    """``(|00> + |11>) / sqrt(2)``."""
    return _uniform_superposition(2, [0b00, 0b11])


def prepare_w(n: int) -> StateVector:
    if n < 2:
        raise ValueError(f"W state needs n >= 2, got {n}")
    return _uniform_superposition(n, hamming_weight_states(n, 1))


def prepare_dicke(n: int, k: int) -> StateVector:
    """Equal superposition of all ``comb(n, k)`` weight-``k`` basis states."""
    if n < 2 or not 1 <= k <= n - 1:
        raise ValueError(f"Dicke state needs 1 <= k <= n-1, got n={n}, k={k}")
    support = hamming_weight_states(n, k)
    assert len(support) == comb(n, k)
    return _uniform_superposition(n, support)

"""Offset estimation from outcome frequencies and its shot-noise accuracy."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .protocol import (
    ProtocolConfig,
    PartyConfig,
    analytic_probability,
    cosine_amplitude,
    run_protocol_exact,
    sample_shots,
)
from .states import EntangledStateKind

SINGULAR_SIN = 1e-9


class SingularOffsetWarning(UserWarning):
    """Offset sits where the cosine is flat, so the inversion is ill-conditioned."""


class DegenerateStatisticsWarning(UserWarning):
    """A sample standard deviation was requested from a single trial."""


@dataclass(frozen=True)
class AmplitudeFigure:
    n: int
    k: int
    a0: Fraction

    def __float__(self) -> float:
        return float(self.a0)


def amplitude(n: int, k: int) -> AmplitudeFigure:
    """Cosine amplitude ``k (n - k) / (n (n - 1))`` of a weight-``k`` Dicke register."""
    if n < 2 or not 1 <= k <= n - 1:
        raise ValueError(f"need n >= 2 and 1 <= k <= n-1, got n={n}, k={k}")
    return AmplitudeFigure(n, k, cosine_amplitude(EntangledStateKind.dicke(n, k)))


def k_opt(n: int) -> int:
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    return n // 2


def invert_probability(p: float, a0: float, omega: float) -> float:
    """Offset in ``[0, pi / omega]`` reproducing ``p = 1/2 + a0 cos(omega delta)``.

    Frequencies that overshoot the cosine range are clamped onto it.
    """
    if not a0 > 0:
        raise ValueError(f"a0 must be > 0, got {a0!r}")
    if not omega > 0:
        raise ValueError(f"omega must be > 0, got {omega!r}")
    c = np.clip((p - 0.5) / a0, -1.0, 1.0)
    return float(np.arccos(c) / omega)


def is_singular(omega: float, delta: float) -> bool:
    return abs(np.sin(omega * delta)) < SINGULAR_SIN


def delta_method_std(kind: EntangledStateKind, omega: float, delta: float, shots: int) -> float:
    """First-order shot-noise standard deviation of the offset estimate."""
    p = analytic_probability(kind, omega, delta)
    a0 = float(cosine_amplitude(kind))
    return float(np.sqrt(p * (1 - p) / shots) / (a0 * omega * abs(np.sin(omega * delta))))


def trial_seed(seed: int, cell: tuple, trial: int) -> np.random.SeedSequence:
    """Independent stream for one Monte Carlo trial of one grid cell."""
    return np.random.SeedSequence(seed, spawn_key=(*cell, trial))


def _bob_config(kind: EntangledStateKind, omega: float, delta: float) -> ProtocolConfig:
    # Party 1 carries the offset; any further parties idle and do not affect its marginal.
    parties = [PartyConfig(0), PartyConfig(1, omega, delta)]
    parties += [PartyConfig(i) for i in range(2, kind.n)]
    return ProtocolConfig(kind, tuple(parties), 0)


def monte_carlo_estimates(
    kind: EntangledStateKind, omega: float, delta_true: float, shots: int, trials: int,
    seed: int, cell: tuple = (0,),
) -> tuple[np.ndarray, np.ndarray]:
    """Empirical probabilities and offset estimates, one per trial."""
    if shots < 1 or trials < 1:
        raise ValueError("shots and trials must be >= 1")
    if is_singular(omega, delta_true):
        warnings.warn(
            f"omega*delta = {omega * delta_true:.6g} rad is at a flat point of the cosine; "
            "offset estimates are ill-conditioned",
            SingularOffsetWarning,
            stacklevel=2,
        )
    table = run_protocol_exact(_bob_config(kind, omega, delta_true))
    a0 = float(cosine_amplitude(kind))
    p_hat = np.empty(trials)
    for t in range(trials):
        record = sample_shots(table, shots, trial_seed(seed, cell, t))
        p_hat[t] = record.pooled_p_pos(1)
    delta_hat = np.array([invert_probability(p, a0, omega) for p in p_hat])
    return p_hat, delta_hat


def _sample_std(values: np.ndarray) -> float:
    if values.size < 2:
        warnings.warn(
            "a single trial has no sample spread; reporting 0", DegenerateStatisticsWarning,
            stacklevel=3,
        )
        return 0.0
    return float(np.std(values, ddof=1))


def monte_carlo_std(
    kind: EntangledStateKind, omega: float, delta_true: float, shots: int, trials: int,
    seed: int, cell: tuple = (0,),
) -> float:
    """Sample standard deviation (seconds) of shot-noise-limited offset estimates."""
    _, delta_hat = monte_carlo_estimates(kind, omega, delta_true, shots, trials, seed, cell)
    return _sample_std(delta_hat)


@dataclass(frozen=True)
class EstimationCell:
    kind: EntangledStateKind
    omega: float
    delta_true: float
    p_exact: float
    p_empirical: float
    delta_hat: float
    abs_error: float
    std: float
    singular: bool


@dataclass(frozen=True, eq=False)
class EstimationReport:
    """Offset-estimate spread for every (protocol kind, frequency) pair.

    ``cells`` is ordered kind-major; ``p_empirical``, ``delta_hat`` and
    ``abs_error`` are trial means.
    """

    kinds: tuple
    omegas: tuple
    cells: tuple
    shots: int
    trials: int
    seed: int

    @property
    def degenerate(self) -> bool:
        return self.trials < 2

    def std_grid(self) -> np.ndarray:
        """Standard deviations in seconds, shape ``(len(kinds), len(omegas))``."""
        return np.array([c.std for c in self.cells]).reshape(len(self.kinds), len(self.omegas))

    def cell(self, kind: EntangledStateKind, omega: float) -> EstimationCell:
        for c in self.cells:
            if c.kind == kind and c.omega == omega:
                return c
        raise KeyError((kind, omega))


def comparison_table(
    omegas: Sequence[float], kinds: Sequence[EntangledStateKind], shots: int, trials: int,
    seed: int, omega_delta: float = np.pi / 2,
) -> EstimationReport:
    """Offset-estimate spread per protocol and frequency at a fixed phase ``omega * delta``.

    Each (kind, frequency) cell draws from its own seed stream.
    """
    if len(omegas) == 0 or len(kinds) == 0:
        raise ValueError("omegas and kinds must be nonempty")
    cells = []
    for ki, kind in enumerate(kinds):
        for wi, omega in enumerate(omegas):
            delta = omega_delta / omega
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", DegenerateStatisticsWarning)
                p_hat, d_hat = monte_carlo_estimates(kind, omega, delta, shots, trials, seed, (ki, wi))
                std = _sample_std(d_hat)
            cells.append(
                EstimationCell(
                    kind=kind,
                    omega=float(omega),
                    delta_true=float(delta),
                    p_exact=run_protocol_exact(_bob_config(kind, omega, delta)).p_pos(1),
                    p_empirical=float(p_hat.mean()),
                    delta_hat=float(d_hat.mean()),
                    abs_error=float(np.abs(d_hat - delta).mean()),
                    std=std,
                    singular=is_singular(omega, delta),
                )
            )
    if trials < 2:
        warnings.warn("trials=1: standard deviations reported as 0", DegenerateStatisticsWarning,
                      stacklevel=2)
    return EstimationReport(tuple(kinds), tuple(float(w) for w in omegas), tuple(cells),
                            shots, trials, seed)

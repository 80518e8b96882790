"""Experiment configuration files and built-in presets.

Configs are JSON objects. Frequencies are given in Hz and converted to rad/s
on load; times are in seconds. See ``README.md`` for the full schema.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from .hamiltonian import MoleculeSpec
from .protocol import ConfigError
from .states import EntangledStateKind

PRESETS = ("fig5", "fig6", "table1", "echo4")


@dataclass(frozen=True)
class PartySpec:
    index: int
    omega_hz: float

    @property
    def omega(self) -> float:
        return 2 * np.pi * self.omega_hz


@dataclass(frozen=True)
class ExperimentConfig:
    kinds: tuple
    parties: tuple
    standard_index: int = 0
    delta_start: float = 0.0
    delta_stop: float = 0.0
    delta_count: int = 1
    shots: int | None = None
    trials: int = 200
    seed: int = 0
    omega_delta: float = np.pi / 2
    molecule: MoleculeSpec | None = None
    echo_deltas: tuple = (1e-3,)
    source: str = field(default="<config>", compare=False)

    def deltas(self) -> np.ndarray:
        return np.linspace(self.delta_start, self.delta_stop, self.delta_count)

    def table_omegas_hz(self) -> list[float]:
        seen = []
        for p in self.parties:
            if p.omega_hz not in seen:
                seen.append(p.omega_hz)
        return seen


def _get(obj: dict, key: str, kind, where: str, default: Any = ...):
    if key not in obj:
        if default is ...:
            raise ConfigError(f"{where}: missing required field '{key}'")
        return default
    value = obj[key]
    if value is None and default is None:
        return None
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if isinstance(value, bool) or not isinstance(value, kind):
        raise ConfigError(f"{where}.{key}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def _parse_kind(obj: Any, where: str) -> EntangledStateKind:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object like {{\"family\": \"w\", \"n\": 4}}")
    family = _get(obj, "family", str, where)
    try:
        if family == "bell":
            return EntangledStateKind.bell()
        if family == "w":
            return EntangledStateKind.w(_get(obj, "n", int, where))
        if family == "dicke":
            return EntangledStateKind.dicke(_get(obj, "n", int, where), _get(obj, "k", int, where))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{where}: {exc}") from None
    raise ConfigError(f"{where}.family: unknown family {family!r} (use bell, w or dicke)")


def parse_molecule(obj: Any, where: str = "molecule") -> MoleculeSpec:
    """Molecule schema: ``{"n": int, "omega_hz": [n floats], "j_hz": [n(n-1)/2 floats]}``.

    ``j_hz`` lists the upper triangle row by row: (0,1), (0,2), ..., (1,2), ...
    """
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    n = _get(obj, "n", int, where)
    omega_hz = _get(obj, "omega_hz", list, where)
    j_hz = _get(obj, "j_hz", list, where)
    if n < 1:
        raise ConfigError(f"{where}.n: must be >= 1")
    if len(omega_hz) != n:
        raise ConfigError(f"{where}.omega_hz: expected {n} values, got {len(omega_hz)}")
    if len(j_hz) != n * (n - 1) // 2:
        raise ConfigError(f"{where}.j_hz: expected {n * (n - 1) // 2} values, got {len(j_hz)}")
    try:
        return MoleculeSpec.from_hz(np.asarray(omega_hz, dtype=float), np.asarray(j_hz, dtype=float))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def load_json(path: Path) -> Any:
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def parse_config(obj: Any, source: str = "<config>", base_dir: Path | None = None) -> ExperimentConfig:
    if not isinstance(obj, dict):
        raise ConfigError(f"{source}: top level must be an object")
    where = source
    kinds_raw = _get(obj, "kinds", list, where)
    if not kinds_raw:
        raise ConfigError(f"{where}.kinds: must list at least one state kind")
    kinds = tuple(_parse_kind(k, f"{where}.kinds[{i}]") for i, k in enumerate(kinds_raw))
    standard = _get(obj, "standard_index", int, where, 0)

    parties = []
    for i, p in enumerate(_get(obj, "parties", list, where)):
        pw = f"{where}.parties[{i}]"
        if not isinstance(p, dict):
            raise ConfigError(f"{pw}: expected an object")
        idx = _get(p, "index", int, pw)
        hz = _get(p, "omega_hz", float, pw)
        if not (np.isfinite(hz) and hz >= 0):
            raise ConfigError(f"{pw}.omega_hz: must be a finite frequency >= 0")
        if idx == standard:
            raise ConfigError(f"{pw}.index: {idx} is the standard clock")
        for kind in kinds:
            if not 0 <= idx < kind.n:
                raise ConfigError(f"{pw}.index: {idx} out of range for {kind.label}")
        parties.append(PartySpec(idx, hz))
    if not parties:
        raise ConfigError(f"{where}.parties: must list at least one party")
    if len({p.index for p in parties}) != len(parties):
        raise ConfigError(f"{where}.parties: duplicate party index")
    for kind in kinds:
        if not 0 <= standard < kind.n:
            raise ConfigError(f"{where}.standard_index: out of range for {kind.label}")

    grid = _get(obj, "delta_grid", dict, where, {"start_s": 0.0, "stop_s": 0.0, "count": 1})
    gw = f"{where}.delta_grid"
    start = _get(grid, "start_s", float, gw)
    stop = _get(grid, "stop_s", float, gw)
    count = _get(grid, "count", int, gw)
    if count < 1:
        raise ConfigError(f"{gw}.count: must be >= 1")

    shots = _get(obj, "shots", int, where, None)
    if shots is not None and shots < 1:
        raise ConfigError(f"{where}.shots: must be >= 1")
    trials = _get(obj, "trials", int, where, 200)
    if trials < 1:
        raise ConfigError(f"{where}.trials: must be >= 1")
    seed = _get(obj, "seed", int, where, 0)
    if seed < 0:
        raise ConfigError(f"{where}.seed: must be >= 0")
    omega_delta = _get(obj, "omega_delta_rad", float, where, np.pi / 2)

    molecule = None
    mol_raw = obj.get("molecule")
    if isinstance(mol_raw, str):
        mol_path = Path(mol_raw)
        if not mol_path.is_absolute() and base_dir is not None:
            mol_path = base_dir / mol_path
        molecule = parse_molecule(load_json(mol_path), str(mol_path))
    elif mol_raw is not None:
        molecule = parse_molecule(mol_raw, f"{where}.molecule")

    echo_raw = _get(obj, "echo_deltas_s", list, where, [1e-3])
    echo = []
    for i, d in enumerate(echo_raw):
        if isinstance(d, bool) or not isinstance(d, (int, float)) or not d >= 0:
            raise ConfigError(f"{where}.echo_deltas_s[{i}]: must be a number >= 0")
        echo.append(float(d))

    return ExperimentConfig(
        kinds=kinds,
        parties=tuple(parties),
        standard_index=standard,
        delta_start=start,
        delta_stop=stop,
        delta_count=count,
        shots=shots,
        trials=trials,
        seed=seed,
        omega_delta=omega_delta,
        molecule=molecule,
        echo_deltas=tuple(echo),
        source=source,
    )


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    return parse_config(load_json(path), str(path), path.parent)


def load_preset(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    text = resources.files("qclocksync").joinpath("presets", f"{name}.json").read_text()
    return parse_config(json.loads(text), f"preset:{name}")

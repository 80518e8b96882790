"""Command-line entry point: ``qclocksync {sweep,echo-verify,table}``.

Every subcommand writes CSV (header row, LF line endings) to ``--out`` or
stdout. Exit codes: 0 success, 2 configuration error, 3 output error.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
import warnings
from dataclasses import replace

import numpy as np

from .config import PRESETS, ExperimentConfig, load_config, load_preset
from .estimator import DegenerateStatisticsWarning, comparison_table, trial_seed
from .hamiltonian import (
    IdealClockSpec,
    MAX_DENSE_QUBITS,
    build_paper_echo_sequence,
    design_refocusing_sequence,
    verify_echo,
)
from .protocol import ConfigError, PartyConfig, ProtocolConfig, analytic_probability, run_protocol_exact, sample_shots

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def _protocol_config(cfg: ExperimentConfig, kind) -> ProtocolConfig:
    omegas = {p.index: p.omega for p in cfg.parties}
    parties = [PartyConfig(i, omegas.get(i, 0.0)) for i in range(kind.n)]
    return ProtocolConfig(kind, tuple(parties), cfg.standard_index)


def sweep_rows(cfg: ExperimentConfig) -> list[list]:
    header = ["protocol", "delta_s", "party", "omega_hz", "p_exact", "p_analytic", "p_sampled"]
    rows = [header]
    for ki, kind in enumerate(cfg.kinds):
        base = _protocol_config(cfg, kind)
        for di, delta in enumerate(cfg.deltas()):
            delta = float(delta)
            table = run_protocol_exact(base.with_delta(delta))
            record = None
            if cfg.shots is not None:
                record = sample_shots(table, cfg.shots, trial_seed(cfg.seed, (ki, di), 0))
            for p in cfg.parties:
                sampled = "" if record is None else record.pooled_p_pos(p.index)
                rows.append([
                    kind.label,
                    delta,
                    p.index,
                    p.omega_hz,
                    table.p_pos(p.index),
                    analytic_probability(kind, p.omega, delta),
                    sampled,
                ])
    return rows


def _fmt_sums(values) -> str:
    return ";".join(str(int(v)) for v in values)


def echo_rows(cfg: ExperimentConfig) -> list[list]:
    mol = cfg.molecule
    if mol is None:
        raise ConfigError(f"{cfg.source}: echo-verify needs a 'molecule' (inline object or file path)")
    if mol.n > MAX_DENSE_QUBITS:
        raise ConfigError(f"{cfg.source}.molecule: at most {MAX_DENSE_QUBITS} qubits, got {mol.n}")
    if not 0 <= cfg.standard_index < mol.n:
        raise ConfigError(f"{cfg.source}.standard_index: out of range for a {mol.n}-qubit molecule")
    ideal = IdealClockSpec.from_molecule(mol, cfg.standard_index)
    header = [
        "sequence", "convention", "delta_s", "fidelity", "segment_count", "segment_duration_s",
        "qubit_sums", "unbalanced_pairs", "residual_flips",
    ]
    rows = [header]
    for delta in cfg.echo_deltas:
        candidates = [("designed", "operator", design_refocusing_sequence(mol.n, cfg.standard_index, delta))]
        if mol.n == 4:
            candidates += [
                ("published", conv, build_paper_echo_sequence(delta, conv)) for conv in ("operator", "diagram")
            ]
        for name, conv, seq in candidates:
            report = verify_echo(seq, mol, ideal, delta)
            st = report.residual_report
            pairs = ";".join(f"{a}-{b}:{s}" for a, b, s in st.unbalanced_pairs())
            rows.append([
                name, conv, delta, report.fidelity, st.segment_count, st.segment_duration,
                _fmt_sums(st.per_qubit_sums), pairs, _fmt_sums(st.residual_flips),
            ])
    return rows


def table_rows(cfg: ExperimentConfig) -> list[list]:
    shots = cfg.shots
    if shots is None:
        raise ConfigError(f"{cfg.source}.shots: the table subcommand needs a shot count")
    omegas_hz = cfg.table_omegas_hz()
    omegas = [2 * np.pi * hz for hz in omegas_hz]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateStatisticsWarning)
        report = comparison_table(omegas, cfg.kinds, shots, cfg.trials, cfg.seed, cfg.omega_delta)
    header = [
        "protocol", "omega_hz", "delta_true_us", "p_exact", "p_empirical_mean", "delta_hat_mean_us",
        "abs_error_mean_us", "std_us", "shots", "trials", "seed", "degenerate", "singular",
    ]
    rows = [header]
    for i, c in enumerate(report.cells):
        rows.append([
            c.kind.label, omegas_hz[i % len(omegas_hz)], c.delta_true * 1e6, c.p_exact, c.p_empirical,
            c.delta_hat * 1e6, c.abs_error * 1e6, c.std * 1e6, report.shots, report.trials,
            report.seed, int(report.degenerate), int(c.singular),
        ])
    return rows


COMMANDS = {"sweep": sweep_rows, "echo-verify": echo_rows, "table": table_rows}


def to_csv(rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qclocksync", description="Multiparty quantum clock synchronization simulator."
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    src = parser.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", metavar="PATH", help="JSON experiment config")
    src.add_argument("--preset", choices=PRESETS, help="built-in config")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--out", metavar="PATH", help="CSV destination (default: stdout)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else load_preset(args.preset)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed: must be >= 0")
            cfg = replace(cfg, seed=args.seed)
        text = to_csv(COMMANDS[args.command](cfg))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out is None:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

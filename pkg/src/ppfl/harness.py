"""Config resolution, experiment execution and CSV output.

Config files are flat ``key = value`` text, one setting per line, ``#`` starts
a comment. Keys are the CLI flag names without leading dashes (``key-bits``
and ``key_bits`` are equivalent). Precedence: CLI flag > file > default.

Output files (written to ``out``):

* ``rounds.csv``: one row per evaluated round, columns :data:`ROUND_COLUMNS`
* ``summary.csv``: one row per run, columns :data:`SUMMARY_COLUMNS`
* ``config.txt``: the fully resolved config, itself a valid config file
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import os
from dataclasses import dataclass

import numpy as np

from .config import ExperimentConfig
from .errors import ConfigError
from .federation import Federation
from .privacy.config import PrivacyConfig

ROUND_COLUMNS = (
    "round",
    "global_acc",
    "global_prec",
    "global_rec",
    "global_f1",
    "mean_personal_acc",
    "mean_loss",
    "server_ms",
    "bytes_up",
    "bytes_down",
)
SUMMARY_COLUMNS = (
    "mechanism",
    "agg",
    "clients",
    "acc_pct",
    "prec_pct",
    "rec_pct",
    "f1_pct",
    "total_server_ms",
    "per_round_server_ms",
    "total_bytes",
)
TIMING_COLUMNS = frozenset({"server_ms", "total_server_ms", "per_round_server_ms"})


def _bool(text):
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _int_list(text):
    return tuple(int(part) for part in str(text).split(",") if part.strip())


def _str_list(text):
    return tuple(part.strip() for part in str(text).split(",") if part.strip())


# flag name -> (config attribute, parser); "privacy." targets PrivacyConfig
OPTIONS = {
    "clients": ("num_clients", int),
    "rounds": ("rounds", int),
    "epochs": ("local_epochs", int),
    "batch-size": ("batch_size", int),
    "model": ("model", str),
    "hidden-dim": ("hidden_dim", int),
    "optimizer": ("optimizer", str),
    "lr": ("lr", float),
    "dataset": ("dataset", str),
    "examples": ("synthetic_examples", int),
    "input-dim": ("synthetic_dim", int),
    "classes": ("synthetic_classes", int),
    "separation": ("synthetic_separation", float),
    "alpha": ("alpha", float),
    "agg": ("aggregation", str),
    "eta-p": ("eta_p", float),
    "lambda": ("lam", float),
    "weighted": ("weighted_avg", _bool),
    "test-fraction": ("test_fraction", float),
    "mechanism": ("privacy.mechanism", _str_list),
    "epsilon": ("privacy.epsilon", float),
    "clip": ("privacy.clip_norm", float),
    "noise": ("privacy.noise_kind", str),
    "delta": ("privacy.delta", float),
    "key-bits": ("privacy.key_bits", int),
    "scale-bits": ("privacy.scale_bits", int),
    "parties": ("privacy.num_parties", int),
    "ring-bits": ("privacy.ring_bits", int),
    "max-abs": ("privacy.max_abs_value", float),
    "seed": ("seed", int),
    "eval-every": ("eval_interval", int),
    "workers": ("workers", int),
    "out": ("out", str),
    "sweep-clients": ("sweep_clients", _int_list),
}


@dataclass(frozen=True)
class Sweep:
    clients: tuple
    mechanisms: tuple


def read_config_file(path):
    """Parse a key=value file into ``{flag name: raw string}``."""
    values, problems = {}, []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                problems.append(f"{path}:{lineno}: expected key=value")
                continue
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("_", "-")
            if key not in OPTIONS:
                problems.append(f"{path}:{lineno}: unknown key {key!r}")
                continue
            values[key] = value
    if problems:
        raise ConfigError("; ".join(problems), problems)
    return values


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ppfl",
        description="Simulate privacy-preserving personalized federated learning.",
        argument_default=None,
    )
    parser.add_argument("--config", help="flat key=value config file")
    for flag in OPTIONS:
        parser.add_argument(f"--{flag}", dest=flag.replace("-", "_"), metavar="VALUE")
    return parser


def _apply(raw):
    """Turn ``{flag: raw string}`` into (config, sweep), collecting every problem."""
    top, privacy, problems = {}, {}, []
    sweep_clients, mechanisms = (), None
    for flag, text in raw.items():
        attr, parse = OPTIONS[flag]
        try:
            value = parse(text)
        except (TypeError, ValueError):
            problems.append(f"--{flag}: cannot parse {text!r}")
            continue
        if attr == "sweep_clients":
            sweep_clients = value
        elif attr == "privacy.mechanism":
            mechanisms = value
        elif attr.startswith("privacy."):
            privacy[attr[len("privacy.") :]] = value
        else:
            top[attr] = value
    if mechanisms is not None:
        if not mechanisms:
            problems.append("--mechanism: empty list")
        else:
            privacy["mechanism"] = mechanisms[0]
    if problems:
        raise ConfigError("; ".join(problems), problems)

    cfg = ExperimentConfig(privacy=PrivacyConfig(**privacy), **top)
    mechs = tuple(mechanisms) if mechanisms else (cfg.privacy.mechanism,)
    checks = [cfg] + [
        dataclasses.replace(cfg, num_clients=n, privacy=dataclasses.replace(cfg.privacy, mechanism=m))
        for n in (sweep_clients or (cfg.num_clients,))
        for m in mechs
    ]
    for candidate in checks:
        for problem in candidate.problems():
            if problem not in problems:
                problems.append(problem)
    if problems:
        raise ConfigError("; ".join(problems), problems)
    sweep = None
    if sweep_clients or len(mechs) > 1:
        sweep = Sweep(sweep_clients or (cfg.num_clients,), mechs)
    return cfg, sweep


def parse_config(argv=None):
    """Resolve defaults, an optional ``--config`` file and CLI flags.

    Returns ``(ExperimentConfig, Sweep | None)``; raises :class:`ConfigError`
    listing every problem found.
    """
    args = build_parser().parse_args(argv)
    raw = read_config_file(args.config) if args.config else {}
    for flag in OPTIONS:
        value = getattr(args, flag.replace("-", "_"))
        if value is not None:
            raw[flag] = value
    return _apply(raw)


def format_config(cfg, sweep=None):
    """Resolved config as ``key = value`` lines (readable back by ``--config``)."""
    lines = []
    for flag, (attr, _) in OPTIONS.items():
        if attr == "sweep_clients":
            if sweep:
                lines.append(f"{flag} = {','.join(map(str, sweep.clients))}")
            continue
        if attr == "privacy.mechanism" and sweep:
            lines.append(f"{flag} = {','.join(sweep.mechanisms)}")
            continue
        target = cfg.privacy if attr.startswith("privacy.") else cfg
        value = getattr(target, attr.split(".")[-1])
        if value is None:
            continue
        lines.append(f"{flag} = {value}")
    return "\n".join(lines) + "\n"


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value


def round_row(record):
    return {
        "round": record.round_index,
        "global_acc": record.global_acc,
        "global_prec": record.global_prec,
        "global_rec": record.global_rec,
        "global_f1": record.global_f1,
        "mean_personal_acc": record.mean_personal_acc,
        "mean_loss": record.mean_loss,
        "server_ms": record.server_ms,
        "bytes_up": record.bytes_up,
        "bytes_down": record.bytes_down,
    }


def summary_row(cfg, records, final_scores):
    total_ms = float(sum(r.server_ms for r in records))
    return {
        "mechanism": cfg.privacy.mechanism,
        "agg": cfg.aggregation,
        "clients": cfg.num_clients,
        "acc_pct": round(100.0 * final_scores["accuracy"], 2),
        "prec_pct": round(100.0 * final_scores["precision"], 2),
        "rec_pct": round(100.0 * final_scores["recall"], 2),
        "f1_pct": round(100.0 * final_scores["f1"], 2),
        "total_server_ms": total_ms,
        "per_round_server_ms": total_ms / len(records) if records else 0.0,
        "total_bytes": int(sum(r.bytes_up + r.bytes_down for r in records)),
    }


def write_rows(path, columns, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(row[k]) for k in columns})


def execute(cfg, rounds_path=None):
    """Run one experiment; streams evaluated rounds to ``rounds_path`` if given.

    Returns ``(summary row, records)``. On a runtime failure the rounds
    written so far stay on disk and the error propagates.
    """
    federation = Federation(cfg)
    records = []
    fh = open(rounds_path, "w", newline="") if rounds_path else None
    try:
        writer = None
        if fh:
            writer = csv.DictWriter(fh, fieldnames=ROUND_COLUMNS, lineterminator="\n")
            writer.writeheader()
        for r in range(cfg.rounds):
            evaluate = (r + 1) % cfg.eval_interval == 0 or r == cfg.rounds - 1
            record = federation.run_round(evaluate=evaluate)
            records.append(record)
            if writer and record.evaluated:
                writer.writerow({k: _cell(v) for k, v in round_row(record).items()})
                fh.flush()
    finally:
        if fh:
            fh.close()
    final = federation.evaluate()
    return summary_row(cfg, records, final), records


def run(cfg, sweep=None):
    """Run ``cfg`` (or the sweep), write the CSVs, and return the summary rows."""
    os.makedirs(cfg.out, exist_ok=True)
    with open(os.path.join(cfg.out, "config.txt"), "w") as fh:
        fh.write(format_config(cfg, sweep))
    if sweep is not None:
        rows = run_sweep(cfg, sweep.clients, sweep.mechanisms)
    else:
        row, _ = execute(cfg, os.path.join(cfg.out, "rounds.csv"))
        rows = [row]
    write_rows(os.path.join(cfg.out, "summary.csv"), SUMMARY_COLUMNS, rows)
    return rows


def run_sweep(cfg, clients, mechanisms=None):
    """One summary row per (mechanism, client count), mechanisms outermost."""
    if not clients:
        raise ConfigError("sweep needs at least one client count")
    mechanisms = mechanisms or (cfg.privacy.mechanism,)
    rows = []
    for mech in mechanisms:
        for n in clients:
            variant = dataclasses.replace(
                cfg, num_clients=n, privacy=dataclasses.replace(cfg.privacy, mechanism=mech)
            )
            row, _ = execute(variant)
            rows.append(row)
    return rows


def read_rows(path):
    """Load a CSV written by this module back into typed dicts."""
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            typed = {}
            for key, text in row.items():
                if text == "":
                    typed[key] = None
                elif key in ("mechanism", "agg"):
                    typed[key] = text
                elif key in ("round", "clients", "bytes_up", "bytes_down", "total_bytes"):
                    typed[key] = int(text)
                else:
                    typed[key] = float(text)
            out.append(typed)
    return out

"""Median per-round server time for each mechanism across client counts.

Writes ``overhead.csv`` with one row per (mechanism, clients) pair. The
default model has about 7.9k parameters (784 inputs, 10 classes).

    python3 scripts/overhead_sweep.py --clients 4,8,16 --rounds 5 --key-bits 256
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import os
import statistics

from ppfl.config import ExperimentConfig
from ppfl.harness import execute
from ppfl.privacy import PrivacyConfig


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--clients", default="4,8,16")
    parser.add_argument("--mechanisms", default="none,dp,sa,smpc,he")
    parser.add_argument("--rounds", type=int, default=5)
    parser.add_argument("--input-dim", type=int, default=784)
    parser.add_argument("--key-bits", type=int, default=256)
    parser.add_argument("--parties", type=int, default=3)
    parser.add_argument("--out", default="results/overhead")
    args = parser.parse_args()

    base = ExperimentConfig(rounds=args.rounds, synthetic_dim=args.input_dim, eval_interval=args.rounds)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "overhead.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["mechanism", "clients", "median_server_ms", "max_server_ms", "bytes_up_per_round"])
        for mech in args.mechanisms.split(","):
            for n in (int(x) for x in args.clients.split(",")):
                privacy = PrivacyConfig(mechanism=mech, key_bits=args.key_bits, num_parties=args.parties)
                _, records = execute(dataclasses.replace(base, num_clients=n, privacy=privacy))
                times = [r.server_ms for r in records]
                row = [mech, n, statistics.median(times), max(times), records[0].bytes_up]
                writer.writerow(row)
                fh.flush()
                print(f"{mech:>5} N={n:<3} median {row[2]:10.3f} ms  up {row[4]} bytes")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()

"""Accuracy and cost of every privacy mechanism under FedAvg and APPLE.

Thin wrapper over the ``ppfl`` CLI sweep: one summary row per
(mechanism, aggregation) pair in ``<out>/<agg>/summary.csv``.

    python3 scripts/mechanism_comparison.py --clients 8 --rounds 20
"""

from __future__ import annotations

import argparse
import os
import sys

from ppfl.cli import main as ppfl_main


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--clients", default="8")
    parser.add_argument("--rounds", default="20")
    parser.add_argument("--key-bits", default="256")
    parser.add_argument("--out", default="results/mechanisms")
    args, extra = parser.parse_known_args()
    for agg in ("fedavg", "apple"):
        code = ppfl_main(
            [
                "--agg", agg,
                "--mechanism", "none,dp,sa,smpc,he",
                "--sweep-clients", args.clients,
                "--rounds", args.rounds,
                "--key-bits", args.key_bits,
                "--out", os.path.join(args.out, agg),
            ]
            + extra
        )
        if code:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())

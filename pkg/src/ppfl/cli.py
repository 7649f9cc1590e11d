"""Command-line entry point: ``ppfl`` or ``python -m ppfl``.

Exit codes: 0 success, 2 configuration error, 3 runtime or protocol error.
"""

from __future__ import annotations

import logging
import sys

from .errors import ConfigError, PPFLError
from .harness import format_config, parse_config, run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg, sweep = parse_config(argv)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    sys.stdout.write(format_config(cfg, sweep))
    try:
        rows = run(cfg, sweep)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_CONFIG
    except (PPFLError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    for row in rows:
        print(
            f"{row['mechanism']:>5} {row['agg']:>6} N={row['clients']:<4} "
            f"acc={row['acc_pct']:6.2f} f1={row['f1_pct']:6.2f} "
            f"server_ms/round={row['per_round_server_ms']:.3f}"
        )
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

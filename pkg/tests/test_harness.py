import csv
import dataclasses
import statistics

import numpy as np
import pytest

from ppfl.cli import main
from ppfl.config import ExperimentConfig
from ppfl.errors import ConfigError
from ppfl.harness import (
    ROUND_COLUMNS,
    SUMMARY_COLUMNS,
    TIMING_COLUMNS,
    execute,
    format_config,
    parse_config,
    read_config_file,
    read_rows,
    run,
    run_sweep,
)
from ppfl.federation import Federation

SMALL = [
    "--clients", "4", "--rounds", "3", "--examples", "400", "--input-dim", "6",
    "--classes", "3", "--separation", "4", "--lr", "0.05",
]


def strip_timing(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [{k: v for k, v in row.items() if k not in TIMING_COLUMNS} for row in rows]


def test_defaults_without_arguments():
    cfg, sweep = parse_config([])
    assert cfg == ExperimentConfig()
    assert sweep is None
    assert (cfg.num_clients, cfg.rounds, cfg.batch_size, cfg.privacy.mechanism) == (16, 50, 32, "none")


def test_precedence_cli_over_file_over_default(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\nepsilon = 1\nkey_bits=512\n\nrounds = 7  # trailing\n")
    cfg, _ = parse_config(["--config", str(path), "--epsilon", "2"])
    assert cfg.privacy.epsilon == 2.0
    assert cfg.privacy.key_bits == 512
    assert cfg.rounds == 7
    assert cfg.lr == ExperimentConfig().lr


def test_config_file_errors(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("colour = blue\njust words\n")
    with pytest.raises(ConfigError) as info:
        read_config_file(path)
    assert len(info.value.problems) == 2
    assert "colour" in info.value.problems[0]


def test_all_problems_are_reported():
    with pytest.raises(ConfigError) as info:
        parse_config(["--key-bits", "100", "--clients", "0", "--epsilon", "abc"])
    text = " ".join(info.value.problems)
    assert "epsilon" in text
    with pytest.raises(ConfigError) as info:
        parse_config(["--key-bits", "100", "--clients", "0", "--mechanism", "he"])
    assert len(info.value.problems) >= 2


def test_format_config_roundtrips(tmp_path):
    cfg, sweep = parse_config(["--mechanism", "dp,sa", "--sweep-clients", "2,4", "--lr", "0.125"])
    path = tmp_path / "echo.cfg"
    path.write_text(format_config(cfg, sweep))
    again = parse_config(["--config", str(path)])
    assert again == (cfg, sweep)


def test_cli_exit_codes(tmp_path, capsys):
    out = tmp_path / "ok"
    assert main(SMALL + ["--out", str(out)]) == 0
    assert (out / "rounds.csv").exists() and (out / "summary.csv").exists()
    assert "clients = 4" in capsys.readouterr().out
    assert main(["--key-bits", "100", "--mechanism", "he"]) == 2
    assert "key" in capsys.readouterr().err


def test_runtime_failure_keeps_partial_rounds(tmp_path, monkeypatch, capsys):
    from ppfl.errors import ProtocolError
    from ppfl.privacy.mechanism import Mechanism

    original = Mechanism.protect

    def flaky(self, client_id, update, round_index):
        if round_index == 2 and client_id == 1:
            raise ProtocolError("simulated transport fault")
        return original(self, client_id, update, round_index)

    monkeypatch.setattr(Mechanism, "protect", flaky)
    out = tmp_path / "boom"
    assert main(SMALL + ["--rounds", "5", "--out", str(out)]) == 3
    assert "protect failed at client 1" in capsys.readouterr().err
    assert [r["round"] for r in read_rows(out / "rounds.csv")] == [0, 1]


def test_untrained_model_is_near_chance():
    cfg, _ = parse_config(SMALL + ["--rounds", "0", "--classes", "4", "--examples", "4000"])
    row, records = execute(cfg)
    assert records == []
    assert abs(row["acc_pct"] - 25.0) <= 5.0


def test_csv_outputs_and_numeric_roundtrip(tmp_path):
    cfg, _ = parse_config(SMALL + ["--eval-every", "2", "--out", str(tmp_path)])
    fed = Federation(cfg)
    rows = run(cfg)
    rounds = read_rows(tmp_path / "rounds.csv")
    with open(tmp_path / "rounds.csv") as fh:
        assert fh.readline().strip().split(",") == list(ROUND_COLUMNS)
    with open(tmp_path / "summary.csv") as fh:
        assert fh.readline().strip().split(",") == list(SUMMARY_COLUMNS)
    assert [r["round"] for r in rounds] == [1, 2]
    for _ in range(cfg.rounds):
        fed.run_round(evaluate=False)
    scores = fed.evaluate()
    assert rounds[-1]["global_acc"] == scores["accuracy"]
    assert rounds[-1]["global_f1"] == scores["f1"]
    summary = read_rows(tmp_path / "summary.csv")[0]
    assert summary["acc_pct"] == round(100 * scores["accuracy"], 2)
    assert summary["prec_pct"] == round(100 * scores["precision"], 2)
    assert summary == {**rows[0], "total_server_ms": summary["total_server_ms"],
                       "per_round_server_ms": summary["per_round_server_ms"]}


def test_identical_runs_give_identical_csvs(tmp_path):
    for name in ("a", "b"):
        assert main(SMALL + ["--agg", "apple", "--mechanism", "dp", "--out", str(tmp_path / name)]) == 0
    for fname in ("rounds.csv", "summary.csv"):
        assert strip_timing(tmp_path / "a" / fname) == strip_timing(tmp_path / "b" / fname)


def test_sweep_of_one_equals_plain_run(tmp_path):
    cfg, sweep = parse_config(SMALL + ["--sweep-clients", "4", "--out", str(tmp_path)])
    assert sweep.clients == (4,)
    swept = run_sweep(cfg, sweep.clients, sweep.mechanisms)
    plain, _ = execute(cfg)
    drop = lambda row: {k: v for k, v in row.items() if k not in TIMING_COLUMNS}
    assert [drop(r) for r in swept] == [drop(plain)]


def test_mechanism_list_sweeps(tmp_path):
    cfg, sweep = parse_config(SMALL + ["--mechanism", "none,sa", "--sweep-clients", "2,3", "--out", str(tmp_path)])
    rows = run(cfg, sweep)
    assert [(r["mechanism"], r["clients"]) for r in rows] == [
        ("none", 2), ("none", 3), ("sa", 2), ("sa", 3)
    ]
    assert len(read_rows(tmp_path / "summary.csv")) == 4


@pytest.mark.slow
def test_more_parties_cost_more_server_time():
    cfg, _ = parse_config(["--clients", "8", "--rounds", "7", "--input-dim", "784", "--mechanism", "smpc"])
    medians = {}
    for k in (2, 3):
        variant = dataclasses.replace(cfg, privacy=dataclasses.replace(cfg.privacy, num_parties=k))
        _, records = execute(variant)
        medians[k] = statistics.median(r.server_ms for r in records)
    assert medians[3] >= medians[2]

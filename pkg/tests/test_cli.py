"""Command-line interface: exit codes, overrides, and stage wiring."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

from culturestream.cli import main


def _synth_inputs(tmp_path):
    out = tmp_path / "stream"
    code = main([
        "synth", "--out", str(out), "--seed", "3", "--weeks", "3",
        "--groups", "A:4,B:4", "--rate", "3",
    ])
    assert code == 0
    return out / "corpus.jsonl", out / "roster.csv"


def _run_args(tmp_path, corpus, roster, out_name="out"):
    return [
        "--corpus", str(corpus), "--roster", str(roster),
        "--out", str(tmp_path / out_name), "--epoch", "0", "--weeks", "3",
    ]


class TestExitCodes:
    def test_missing_subcommand_is_usage_error(self, capsys):
        assert main([]) == 1
        assert "error" in capsys.readouterr().err

    def test_unknown_flag_is_usage_error(self, capsys):
        assert main(["report", "--frobnicate"]) == 1

    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0
        assert "report" in capsys.readouterr().out
        assert main(["synth", "--help"]) == 0

    def test_bad_epoch_is_usage_error(self, tmp_path, capsys):
        corpus, roster = _synth_inputs(tmp_path)
        args = _run_args(tmp_path, corpus, roster)
        args[args.index("--epoch") + 1] = "not-a-date"
        assert main(["report", *args]) == 1
        assert "epoch" in capsys.readouterr().err

    def test_missing_corpus_is_usage_error(self, tmp_path, capsys):
        _, roster = _synth_inputs(tmp_path)
        args = _run_args(tmp_path, tmp_path / "nope.jsonl", roster)
        assert main(["report", *args]) == 1
        assert "corpus" in capsys.readouterr().err

    def test_conflicting_roster_is_data_error(self, tmp_path, capsys):
        corpus, _ = _synth_inputs(tmp_path)
        roster = tmp_path / "roster.csv"
        roster.write_text("user,group\nalice,A\nalice,B\n")
        assert main(["report", *_run_args(tmp_path, corpus, roster)]) == 2
        assert "data error" in capsys.readouterr().err

    def test_bad_burst_spec_is_usage_error(self, tmp_path, capsys):
        code = main(["synth", "--out", str(tmp_path / "s"), "--burst", "storm:7"])
        assert code == 1
        assert "--burst" in capsys.readouterr().err


class TestSelftest:
    def test_full_battery_passes(self, capsys):
        assert main(["selftest"]) == 0
        out = capsys.readouterr().out
        assert "checks passed" in out
        assert "FAIL" not in out

    def test_single_check_selection(self, capsys):
        assert main(["selftest", "--only", "focus_single_fact"]) == 0
        assert "1/1 checks passed" in capsys.readouterr().out

    def test_unknown_check_is_usage_error(self, capsys):
        assert main(["selftest", "--only", "astrology"]) == 1


class TestRoundTrip:
    def test_synth_then_report(self, tmp_path, capsys):
        corpus, roster = _synth_inputs(tmp_path)
        assert main(["report", *_run_args(tmp_path, corpus, roster)]) == 0
        assert "artifacts" in capsys.readouterr().out
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert manifest["ingest"]["transactions"] > 0
        assert all(v == "ok" for v in manifest["practices"].values())

    def test_ingest_writes_stream_and_report(self, tmp_path, capsys):
        corpus, roster = _synth_inputs(tmp_path)
        assert main(["ingest", *_run_args(tmp_path, corpus, roster)]) == 0
        assert "transactions" in capsys.readouterr().out
        assert (tmp_path / "out" / "transactions.jsonl").exists()
        assert (tmp_path / "out" / "ingest_report.csv").exists()

    def test_flags_override_config_file(self, tmp_path):
        corpus, roster = _synth_inputs(tmp_path)
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            f"corpus = {corpus}\nroster = {roster}\n"
            "epoch = 0\nweeks = 3\nrbo_p = 0.9\n"
        )
        out = tmp_path / "out"
        code = main(["report", "--config", str(cfg), "--out", str(out), "--rbo-p", "0.5"])
        assert code == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["rbo_p"] == 0.5

    def test_practices_flag_narrows_run(self, tmp_path):
        corpus, roster = _synth_inputs(tmp_path)
        args = _run_args(tmp_path, corpus, roster)
        assert main(["report", *args, "--practices", "tagging"]) == 0
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert set(manifest["practices"]) == {"tagging"}
        assert "vectors_retweeting.csv" not in manifest["artifacts"]


class TestStageSubsets:
    @pytest.fixture()
    def inputs(self, tmp_path):
        corpus, roster = _synth_inputs(tmp_path)
        return tmp_path, corpus, roster

    def test_measure_emits_vectors_and_series_only(self, inputs):
        tmp_path, corpus, roster = inputs
        assert main(["measure", *_run_args(tmp_path, corpus, roster, "m")]) == 0
        names = {p.name for p in (tmp_path / "m").iterdir()}
        assert "vectors_tagging.csv" in names
        assert "focus_tagging.csv" in names
        assert "ingest_report.csv" in names
        assert not any(n.startswith(("facts_", "network_", "edges_")) for n in names)

    def test_facts_emits_fact_tables_only(self, inputs):
        tmp_path, corpus, roster = inputs
        assert main(["facts", *_run_args(tmp_path, corpus, roster, "f")]) == 0
        names = {p.name for p in (tmp_path / "f").iterdir()}
        assert names == {
            "facts_tagging.csv", "facts_retweeting.csv", "facts_mentioning.csv",
            "manifest.json",
        }

    def test_network_emits_graph_tables_only(self, inputs):
        tmp_path, corpus, roster = inputs
        assert main(["network", *_run_args(tmp_path, corpus, roster, "n")]) == 0
        names = {p.name for p in (tmp_path / "n").iterdir()}
        assert names == {
            "network_retweeting.csv", "edges_retweeting.csv",
            "network_mentioning.csv", "edges_mentioning.csv",
            "manifest.json",
        }


def test_console_script_entry_point(tmp_path):
    result = subprocess.run(
        [sys.executable, "-m", "culturestream.cli", "selftest", "--only", "rbo_identical"],
        capture_output=True, text=True,
    )
    assert result.returncode == 0
    assert "1/1 checks passed" in result.stdout

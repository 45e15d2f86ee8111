"""End-to-end CLI behavior: files written, stdout keys, exit codes."""

import subprocess
import sys

import pytest

from notchcast import cli


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    """One default synth run shared by the read-only CLI tests."""
    out = tmp_path_factory.mktemp("synth")
    assert cli.main(["synth", "--out-dir", str(out)]) == 0
    return out


@pytest.fixture(scope="module")
def fast_config(tmp_path_factory):
    """A small training config so CLI tests stay quick."""
    path = tmp_path_factory.mktemp("cfg") / "fast.cfg"
    path.write_text("epochs=80\nhidden_size=8\n")
    return path


class TestSynth:
    def test_writes_events_and_truth(self, synth_dir):
        assert (synth_dir / "events.csv").is_file()
        assert (synth_dir / "ground_truth.txt").is_file()
        header = (synth_dir / "events.csv").read_text().splitlines()[0]
        assert header == "entity_id,region,date,rating"

    def test_seed_flag_changes_output(self, synth_dir, tmp_path):
        assert cli.main(["synth", "--out-dir", str(tmp_path), "--seed", "99"]) == 0
        assert (tmp_path / "events.csv").read_bytes() != (synth_dir / "events.csv").read_bytes()

    def test_creates_nested_out_dir(self, tmp_path):
        out = tmp_path / "a" / "b"
        assert cli.main(["synth", "--out-dir", str(out)]) == 0
        assert (out / "events.csv").is_file()


@pytest.fixture(scope="module")
def train_dir(synth_dir, fast_config, tmp_path_factory):
    out = tmp_path_factory.mktemp("train")
    code = cli.main([
        "train",
        "--events", str(synth_dir / "events.csv"),
        "--config", str(fast_config),
        "--out-dir", str(out),
    ])
    assert code == 0
    return out


@pytest.fixture(scope="module")
def analyze_dir(synth_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("analyze")
    code = cli.main([
        "analyze", "--events", str(synth_dir / "events.csv"),
        "--out-dir", str(out),
    ])
    assert code == 0
    return out


class TestTrain:
    def test_writes_all_outputs(self, train_dir):
        for name in ("us_panel.csv", "intl_panel.csv", "model.txt",
                     "loss_curve.csv", "eval.txt", "predictions.csv"):
            assert (train_dir / name).is_file(), name

    def test_loss_curve_has_one_row_per_epoch(self, train_dir):
        lines = (train_dir / "loss_curve.csv").read_text().splitlines()
        assert lines[0] == "epoch,train_mse,test_mse"
        assert len(lines) == 1 + 80

    def test_final_test_mse_beats_initial_train_mse(self, train_dir):
        lines = (train_dir / "loss_curve.csv").read_text().splitlines()
        first_train = float(lines[1].split(",")[1])
        eval_lines = dict(
            line.split("=", 1) for line in (train_dir / "eval.txt").read_text().splitlines()
        )
        assert float(eval_lines["mse_normalized"]) < first_train

    def test_eval_report_keys(self, train_dir):
        keys = [line.split("=", 1)[0]
                for line in (train_dir / "eval.txt").read_text().splitlines()]
        assert keys == ["mse_normalized", "mse_notch", "baseline_mse", "n_test"]

    def test_checkpoint_header(self, train_dir):
        first = (train_dir / "model.txt").read_text().splitlines()[0]
        assert first == "H=8 W=12"

    def test_dump_dataset_flag(self, synth_dir, tmp_path):
        cfg = tmp_path / "dump.cfg"
        cfg.write_text("epochs=2\nhidden_size=2\ndump_dataset=true\n")
        out = tmp_path / "out"
        code = cli.main([
            "train", "--events", str(synth_dir / "events.csv"),
            "--config", str(cfg), "--out-dir", str(out),
        ])
        assert code == 0
        assert (out / "train_dataset.csv").is_file()
        assert (out / "test_dataset.csv").is_file()


class TestAnalyze:
    def test_writes_reports(self, analyze_dir):
        for name in ("trend.csv", "dips.csv", "lag_profile.csv"):
            assert (analyze_dir / name).is_file(), name

    def test_recovers_true_lag(self, analyze_dir):
        rows = (analyze_dir / "lag_profile.csv").read_text().splitlines()
        assert rows[0] == "lag_months,correlation"
        by_lag = {int(r.split(",")[0]): float(r.split(",")[1]) for r in rows[1:]}
        assert max(by_lag, key=by_lag.get) == 3

    def test_stdout_reports_numbers(self, synth_dir, tmp_path, capsys):
        cli.main(["analyze", "--events", str(synth_dir / "events.csv"),
                  "--out-dir", str(tmp_path)])
        out = capsys.readouterr().out
        assert "best_lag=3" in out
        assert "dips_matched=6" in out

    def test_custom_calendar(self, synth_dir, tmp_path):
        calendar = tmp_path / "calendar.csv"
        calendar.write_text("name,anchor_month,timing\nonly event,2011-08,next_period\n")
        out = tmp_path / "out"
        assert cli.main([
            "analyze", "--events", str(synth_dir / "events.csv"),
            "--out-dir", str(out), "--calendar", str(calendar),
        ]) == 0
        dips = (out / "dips.csv").read_text()
        assert "only event" in dips


class TestRunAll:
    def test_summary_contents(self, tmp_path, fast_config):
        out = tmp_path / "out"
        assert cli.main(["run-all", "--config", str(fast_config),
                         "--out-dir", str(out)]) == 0
        summary = dict(
            line.split("=", 1)
            for line in (out / "summary.txt").read_text().splitlines()
        )
        assert set(summary) == {
            "mse_normalized", "mse_notch", "baseline_mse",
            "best_lag", "correlation_at_best", "dips_detected", "dips_matched",
        }
        assert summary["best_lag"] == "3"
        assert float(summary["mse_normalized"]) < float(summary["baseline_mse"])

    def test_all_artifacts_present(self, tmp_path, fast_config):
        out = tmp_path / "out"
        cli.main(["run-all", "--config", str(fast_config), "--out-dir", str(out)])
        for name in ("events.csv", "ground_truth.txt", "us_panel.csv",
                     "intl_panel.csv", "model.txt", "loss_curve.csv", "eval.txt",
                     "predictions.csv", "trend.csv", "dips.csv",
                     "lag_profile.csv", "summary.txt"):
            assert (out / name).is_file(), name


class TestExitCodes:
    def test_unknown_config_key_is_2(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("not_a_real_key=1\n")
        assert cli.main(["synth", "--config", str(cfg),
                         "--out-dir", str(tmp_path / "out")]) == 2
        assert "not_a_real_key" in capsys.readouterr().err

    def test_bad_config_value_is_2(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("epochs=zero\n")
        assert cli.main(["synth", "--config", str(cfg),
                         "--out-dir", str(tmp_path / "out")]) == 2

    def test_usage_error_is_2(self):
        with pytest.raises(SystemExit) as err:
            cli.main(["no-such-command"])
        assert err.value.code == 2

    def test_missing_required_flag_is_2(self):
        with pytest.raises(SystemExit) as err:
            cli.main(["train"])
        assert err.value.code == 2

    def test_missing_events_file_is_3(self, tmp_path):
        assert cli.main(["train", "--events", str(tmp_path / "absent.csv"),
                         "--out-dir", str(tmp_path / "out")]) == 3

    def test_bad_events_header_is_3(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("wrong,header,entirely,here\nx,US,2011-01-01,AA\n")
        assert cli.main(["analyze", "--events", str(bad),
                         "--out-dir", str(tmp_path / "out")]) == 3
        assert "header" in capsys.readouterr().err

    def test_empty_events_file_is_3(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        assert cli.main(["analyze", "--events", str(empty),
                         "--out-dir", str(tmp_path / "out")]) == 3

    def test_divergence_is_4(self, synth_dir, tmp_path, capsys):
        cfg = tmp_path / "explode.cfg"
        cfg.write_text("epochs=5\nhidden_size=4\nlearning_rate=1e200\n")
        code = cli.main(["train", "--events", str(synth_dir / "events.csv"),
                         "--config", str(cfg), "--out-dir", str(tmp_path / "out")])
        assert code == 4
        assert "epoch" in capsys.readouterr().err


class TestInstalledScript:
    def test_console_entry_point(self, tmp_path):
        result = subprocess.run(
            ["notchcast", "synth", "--out-dir", str(tmp_path)],
            capture_output=True, text=True,
        )
        assert result.returncode == 0, result.stderr
        assert (tmp_path / "events.csv").is_file()

    def test_module_invocation_matches(self, tmp_path):
        result = subprocess.run(
            [sys.executable, "-m", "notchcast", "synth", "--out-dir", str(tmp_path)],
            capture_output=True, text=True,
        )
        assert result.returncode == 0, result.stderr

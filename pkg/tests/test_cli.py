"""Command-line interface tests: determinism, exit codes, precedence."""

import hashlib
import os

import pytest

from gamemux.cli import main
from gamemux.trace_io import SWEEP_HEADER_ROW, read_csv

RUN_FILES = ["native_trace.csv", "bundle_trace.csv", "delay_trace.csv",
             "summary.csv"]


def run_cli(*argv):
    return main(list(argv))


def file_hashes(directory, names):
    return {n: hashlib.sha256((directory / n).read_bytes()).hexdigest()
            for n in names}


def small_run(out, seed=5, extra=()):
    return run_cli("run", "--players", "3", "--packets-per-player", "400",
                   "--period-ms", "60", "--seed", str(seed),
                   "--out", str(out), *extra)


class TestRun:
    def test_outputs_and_determinism(self, tmp_path, capsys):
        assert small_run(tmp_path / "a") == 0
        assert small_run(tmp_path / "b") == 0
        for name in RUN_FILES:
            assert (tmp_path / "a" / name).exists()
        assert file_hashes(tmp_path / "a", RUN_FILES) == \
            file_hashes(tmp_path / "b", RUN_FILES)
        assert "bws=" in capsys.readouterr().out

    def test_seed_changes_outputs(self, tmp_path):
        small_run(tmp_path / "a", seed=5)
        small_run(tmp_path / "b", seed=6)
        assert file_hashes(tmp_path / "a", RUN_FILES) != \
            file_hashes(tmp_path / "b", RUN_FILES)

    def test_invalid_players_is_usage_error(self, tmp_path, capsys):
        code = run_cli("run", "--players", "0", "--period-ms", "60",
                       "--seed", "1", "--out", str(tmp_path / "x"))
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_unknown_game_is_usage_error(self, tmp_path):
        code = small_run(tmp_path / "x", extra=("--game", "quake"))
        assert code == 2

    def test_unwritable_outdir_exits_3(self, tmp_path, capsys):
        blocker = tmp_path / "file"
        blocker.write_text("")
        with pytest.raises(SystemExit) as exc:
            small_run(blocker / "sub")
        assert exc.value.code == 3

    def test_threshold_zero_disables_early_flush(self, tmp_path):
        small_run(tmp_path / "a", extra=("--threshold", "0"))
        rows = read_csv(tmp_path / "a" / "bundle_trace.csv",
                        ["send_t_us", "n_records", "wire_size", "cause"])
        assert all(r[3] == "period" for r in rows)

    def test_profile_file(self, tmp_path):
        toml = tmp_path / "game.toml"
        toml.write_text(
            'name = "custom"\n'
            "[c2s]\n"
            "expected_payload = 50.0\npacket_rate = 4.0\n"
            'apdu = { kind = "discrete", sizes = [50], probs = [1.0] }\n'
            "[s2c]\n"
            "expected_payload = 200.0\npacket_rate = 4.0\n"
            'apdu = { kind = "discrete", sizes = [200], probs = [1.0] }\n')
        assert small_run(tmp_path / "out",
                         extra=("--profile-file", str(toml))) == 0

    def test_profile_file_unknown_key_rejected(self, tmp_path, capsys):
        toml = tmp_path / "game.toml"
        toml.write_text('name = "x"\nbogus = 1\n[c2s]\n[s2c]\n')
        assert small_run(tmp_path / "out",
                         extra=("--profile-file", str(toml))) == 2


class TestSweep:
    def test_grid_rows(self, tmp_path):
        code = run_cli("sweep", "--players", "2,4", "--periods-ms", "20,60",
                       "--packets-per-player", "300", "--seed", "3",
                       "--out", str(tmp_path))
        assert code == 0
        rows = read_csv(tmp_path / "sweep.csv", SWEEP_HEADER_ROW)
        assert len(rows) == 4
        assert {(r[0], r[1]) for r in rows} == \
            {("2", "20.0"), ("2", "60.0"), ("4", "20.0"), ("4", "60.0")}

    def test_bad_list_is_usage_error(self, tmp_path):
        code = run_cli("sweep", "--players", "2;4", "--periods-ms", "20",
                       "--seed", "3", "--out", str(tmp_path))
        assert code == 2


class TestReport:
    def test_prints_per_title_asymptotes(self, capsys):
        assert run_cli("report") == 0
        out = capsys.readouterr().out
        printed = [float(line.split("max saving")[1].split("%")[0])
                   for line in out.splitlines() if "max saving" in line]
        published = [60.07, 8.65, 45.1, 19.88, 40.1, 22.0]
        assert len(printed) == 6
        for got, expected in zip(printed, published):
            assert got == pytest.approx(expected, abs=0.1)

    def test_reads_traces_and_prints_mos(self, tmp_path, capsys):
        small_run(tmp_path)
        assert run_cli("report", "--traces", str(tmp_path),
                       "--net-delay-ms", "20") == 0
        out = capsys.readouterr().out
        assert "MOS" in out and "acceptable" in out

    def test_schema_mismatch_exits_4(self, tmp_path, capsys):
        small_run(tmp_path)
        (tmp_path / "summary.csv").write_text("wrong,header\n1,2\n")
        with pytest.raises(SystemExit) as exc:
            run_cli("report", "--traces", str(tmp_path))
        assert exc.value.code == 4


class TestProfilesAndConfig:
    def test_profiles_list(self, capsys):
        assert run_cli("profiles", "list") == 0
        out = capsys.readouterr().out
        for name in ("wow", "shenzhou", "rom"):
            assert name in out

    def test_config_file_and_flag_precedence(self, tmp_path):
        cfg = tmp_path / "cfg.toml"
        cfg.write_text('game = "rom"\npackets_per_player = 200\n')
        out1 = tmp_path / "from_config"
        run_cli("--config", str(cfg), "run", "--players", "2",
                "--period-ms", "60", "--seed", "1", "--out", str(out1))
        rows = read_csv(out1 / "native_trace.csv",
                        ["t_us", "flow", "dir", "payload", "seq", "ack",
                         "window", "ipid", "push"])
        assert len(rows) == 400                       # config wins over default
        assert all(r[3] in ("0", "33") for r in rows)  # rom uplink payloads

        out2 = tmp_path / "flag_wins"
        run_cli("--config", str(cfg), "run", "--players", "2",
                "--game", "shenzhou", "--period-ms", "60", "--seed", "1",
                "--out", str(out2))
        rows = read_csv(out2 / "native_trace.csv",
                        ["t_us", "flow", "dir", "payload", "seq", "ack",
                         "window", "ipid", "push"])
        assert all(r[3] in ("0", "25") for r in rows)  # flag beats config

    def test_config_via_environment(self, tmp_path, monkeypatch):
        cfg = tmp_path / "cfg.toml"
        cfg.write_text('packets_per_player = 150\n')
        monkeypatch.setenv("GAMEMUX_CONFIG", str(cfg))
        out = tmp_path / "env"
        run_cli("run", "--players", "1", "--period-ms", "60",
                "--seed", "1", "--out", str(out))
        rows = read_csv(out / "native_trace.csv",
                        ["t_us", "flow", "dir", "payload", "seq", "ack",
                         "window", "ipid", "push"])
        assert len(rows) == 150

    def test_unknown_config_key_rejected(self, tmp_path):
        cfg = tmp_path / "cfg.toml"
        cfg.write_text('bogus = 1\n')
        code = run_cli("--config", str(cfg), "profiles", "list")
        assert code == 2

import json
import os

import pytest

from evosim.cli import main


def run_cli(*args):
    return main(list(args))


@pytest.fixture(scope="module")
def cli_log(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("cli")
    path = str(tmp / "events.jsonl")
    assert main(["run", "--days", "2", "--out", path]) == 0
    return path


class TestRun:
    def test_run_writes_log(self, cli_log, capsys):
        assert os.path.exists(cli_log)

    def test_run_prints_log_path(self, tmp_path, capsys):
        path = str(tmp_path / "out.jsonl")
        assert run_cli("run", "--days", "1", "--out", path) == 0
        assert path in capsys.readouterr().out

    def test_ablate_flags(self, tmp_path):
        path = str(tmp_path / "abl.jsonl")
        assert run_cli("run", "--days", "1", "--out", path,
                       "--ablate", "growth,insight,feelings,simple-character") == 0
        config = json.loads(open(path).readline())["payload"]["config"]
        assert config["disable_growth"] and config["disable_insight"]
        assert config["disable_cognitive_feelings"] and config["simple_character"]

    def test_unknown_ablation_exit_2(self, tmp_path, capsys):
        assert run_cli("run", "--days", "1", "--ablate", "telepathy",
                       "--out", str(tmp_path / "x.jsonl")) == 2
        assert "telepathy" in capsys.readouterr().err

    def test_bad_days_exit_2(self, tmp_path):
        assert run_cli("run", "--days", "0", "--out", str(tmp_path / "x.jsonl")) == 2

    def test_bad_config_file_exit_2(self, tmp_path):
        bad = tmp_path / "cfg.json"
        bad.write_text("{not json")
        assert run_cli("run", "--config", str(bad), "--out", str(tmp_path / "x.jsonl")) == 2

    def test_config_file_respected(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"days": 1, "seed": 99}))
        path = str(tmp_path / "cfg.jsonl")
        assert run_cli("run", "--config", str(cfg), "--out", path) == 0
        config = json.loads(open(path).readline())["payload"]["config"]
        assert config["seed"] == 99

    def test_runs_reproducible(self, tmp_path):
        a, b = str(tmp_path / "a.jsonl"), str(tmp_path / "b.jsonl")
        run_cli("run", "--days", "1", "--out", a)
        run_cli("run", "--days", "1", "--out", b)
        assert open(a, "rb").read() == open(b, "rb").read()


class TestMetrics:
    def test_table_output(self, cli_log, capsys):
        assert run_cli("metrics", cli_log) == 0
        out = capsys.readouterr().out
        assert "delta_overall" in out and "benjamin" in out

    def test_json_output(self, cli_log, capsys):
        assert run_cli("metrics", cli_log, "--json") == 0
        report = json.loads(capsys.readouterr().out)
        assert set(report["agents"]) == {"benjamin", "isabella", "sophia"}

    def test_missing_log_exit_3(self, tmp_path, capsys):
        assert run_cli("metrics", str(tmp_path / "absent.jsonl")) == 3

    def test_corrupt_log_exit_3_names_line(self, tmp_path, capsys):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"v":1,"seq":0,"day":0,"tick":0,"agent":"","type":"x","payload":{}}\n###\n')
        assert run_cli("metrics", str(bad)) == 3
        assert "line 2" in capsys.readouterr().err


class TestBfi:
    def test_scores_table(self, cli_log, capsys):
        assert run_cli("bfi", cli_log) == 0
        out = capsys.readouterr().out
        assert "EXT" in out
        rows = [l for l in out.splitlines()[1:] if l.strip()]
        assert len(rows) == 6  # 3 agents x 2 days


class TestCompare:
    def test_compare_two_logs(self, cli_log, tmp_path, capsys):
        other = str(tmp_path / "abl.jsonl")
        run_cli("run", "--days", "2", "--ablate", "growth,insight", "--out", other)
        capsys.readouterr()
        assert run_cli("compare", cli_log, other) == 0
        out = capsys.readouterr().out
        assert "activity_diff" in out

    def test_agent_mismatch_exit_4(self, cli_log, tmp_path, capsys):
        import json as _json
        from evosim.kernel import read_log
        records = read_log(cli_log)
        mutated = tmp_path / "renamed.jsonl"
        with open(mutated, "w") as fh:
            for r in records:
                if r["type"] == "char_init" and r["agent"] == "sophia":
                    r = {**r, "agent": "stranger"}
                fh.write(_json.dumps(r) + "\n")
        assert run_cli("compare", cli_log, str(mutated)) == 4


class TestValidateWorld:
    def test_valid_world(self, capsys):
        from evosim.kernel import RunConfig
        import evosim
        path = os.path.join(os.path.dirname(evosim.__file__), "data", "default_world.csv")
        assert run_cli("validate-world", path) == 0
        assert "ok:" in capsys.readouterr().out

    def test_invalid_world_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("building,place,x,y,capacity,affordances,description,open,close\n"
                       "b,p,1,1,2,Meal,x,22:00,08:00\n")
        assert run_cli("validate-world", str(bad)) == 2
        assert "row 2" in capsys.readouterr().err

    def test_missing_file_exit_2(self, tmp_path):
        assert run_cli("validate-world", str(tmp_path / "none.csv")) == 2

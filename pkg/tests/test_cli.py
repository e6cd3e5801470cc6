import json

import numpy as np
import pytest

from cdasym.cli import main, profile_summary, sweep_table
from cdasym.scenarios import SCENARIO_NAMES, Scenario


def read_report(path):
    return json.loads((path / "report.json").read_text(encoding="utf-8"))


def without_stamp(d):
    return {k: v for k, v in d.items() if k != "created"}


class TestExitCodes:
    def test_list(self, capsys):
        assert main(["list"]) == 0
        out = capsys.readouterr().out
        assert all(name in out for name in SCENARIO_NAMES)

    def test_unknown_scenario(self, tmp_path, capsys):
        assert main(["run", "no-such-thing", "--out", str(tmp_path)]) == 2
        assert "unknown scenario" in capsys.readouterr().err

    def test_unknown_parameter(self, tmp_path):
        assert main(["run", "burgers-hopfcole", "--q", "3", "--out", str(tmp_path)]) == 2

    def test_missing_command(self):
        assert main([]) == 2

    def test_bad_flag_value(self):
        assert main(["run", "burgers-hopfcole", "--n", "many"]) == 2

    def test_solver_failure(self, tmp_path):
        # a step far beyond the convective limit of the preset
        code = main(["run", "burgers-hopfcole", "--dt", "0.5", "--out", str(tmp_path)])
        assert code == 1
        rep = read_report(tmp_path)
        assert rep["verdict"] == "fail" and "error" in rep


class TestRun:
    def test_report_contents(self, tmp_path):
        assert main(["run", "burgers-hopfcole", "--out", str(tmp_path)]) == 0
        text = (tmp_path / "report.json").read_text(encoding="utf-8")
        rep = json.loads(text)
        assert list(rep) == sorted(rep)
        assert set(rep["anchor"]) == {"label", "statement"}
        assert rep["verdict"] == "pass"
        assert rep["config"]["parameters"]["n"] == 2048
        assert (tmp_path / "series.csv").exists()
        assert (tmp_path / "manifest.json").exists()

    def test_plots_have_two_columns(self, tmp_path):
        main(["run", "linear-convection", "--out", str(tmp_path)])
        plots = sorted((tmp_path / "plots").glob("*.dat"))
        assert plots
        for p in plots:
            data = np.loadtxt(p, ndmin=2)
            assert data.shape[1] == 2

    def test_env_output_root(self, tmp_path, monkeypatch):
        monkeypatch.setenv("CDASYM_OUT", str(tmp_path))
        assert main(["run", "burgers-hopfcole"]) == 0
        assert (tmp_path / "burgers-hopfcole" / "report.json").exists()

    def test_config_file_and_override(self, tmp_path):
        cfg = tmp_path / "c.toml"
        cfg.write_text('[run]\nscenario = "burgers-hopfcole"\nn = 1024\nt_end = 0.5\n')
        out = tmp_path / "out"
        assert main(["run", "--config", str(cfg), "--n", "2048", "--out", str(out)]) == 0
        params = read_report(out)["config"]["parameters"]
        assert params["n"] == 2048 and params["t_end"] == 0.5

    def test_missing_config(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "nope.toml")]) == 2

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        main(["run", "burgers-hopfcole", "--out", str(a)])
        main(["run", "burgers-hopfcole", "--out", str(b)])
        assert without_stamp(read_report(a)) == without_stamp(read_report(b))
        assert (a / "series.csv").read_bytes() == (b / "series.csv").read_bytes()


class TestProfile:
    def test_closed_form(self, tmp_path):
        assert main(["profile", "--mass", "1", "--q", "2", "--out", str(tmp_path)]) == 0
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert abs(summary["mass_numeric"] - 1.0) < 1e-8
        y, f = np.loadtxt(tmp_path / "profile.csv", delimiter=",", skiprows=1, unpack=True)
        assert y.size == f.size == 1501

    def test_zero_mass(self):
        _, f, summary = profile_summary(0.0, 2.0)
        assert np.all(f == 0) and summary["verdict"] == "pass"

    def test_dynamical_route(self):
        _, _, summary = profile_summary(1.0, 2.0, "dynamical")
        assert summary["l1_distance_to_closed_form"] < 1e-4

    @pytest.mark.parametrize("argv", [["--mass", "1", "--q", "3"],
                                      ["--mass", "1", "--q", "2", "--dim", "2"],
                                      ["--q", "2"]])
    def test_unsupported(self, argv):
        assert main(["profile", *argv]) == 2


class TestSweep:
    def test_single_cell_matches_run(self, tmp_path):
        table, ok = sweep_table([3.0], [1.0], ["gaussian"])
        res = Scenario("weak-nonlinear", {"q": 3.0}).execute()
        assert list(table) == ["q=3,p=1"]
        cell = {k: v for k, v in table["q=3,p=1"].items() if k not in ("q", "generator")}
        assert cell == res.report("weak_rate_q3", 1.0).to_dict()
        assert ok == res.report("weak_rate_q3", 1.0).verdict

    def test_worker_count_does_not_matter(self):
        serial, _ = sweep_table([3.0, 2.0], [1.0, 2.0], ["gaussian"], jobs=1)
        parallel, _ = sweep_table([2.0, 3.0], [1.0, 2.0], ["gaussian"], jobs=2)
        assert json.dumps(serial, sort_keys=True) == json.dumps(parallel, sort_keys=True)
        assert list(serial) == ["q=2,p=1", "q=2,p=2", "q=3,p=1", "q=3,p=2"]

    def test_command(self, tmp_path):
        cfg = tmp_path / "s.toml"
        cfg.write_text('[sweep]\nq = [2.0]\np = [1, "inf"]\n')
        out = tmp_path / "out"
        assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
        rep = read_report(out)
        assert set(rep["table"]) == {"q=2,p=1", "q=2,p=inf"}

    def test_bad_exponent(self, tmp_path):
        cfg = tmp_path / "s.toml"
        cfg.write_text("[sweep]\nq = [0.5]\n")
        assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path)]) == 2

"""CLI surface: simulate/fit flows, exit codes, error reporting."""

import json

import pytest
from click.testing import CliRunner

from riskreach.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def simulate_log(runner, tmp_path, name="s.jsonl", *extra):
    out = tmp_path / name
    args = ["simulate", "--agent", "always-ha2", "--seed", "1", "--out", str(out),
            *extra]
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output
    return out


class TestSimulate:
    def test_always_ha2_writes_full_session(self, runner, tmp_path):
        out = simulate_log(runner, tmp_path)
        lines = out.read_text().splitlines()
        assert len(lines) == 100
        assert all(json.loads(line)["human_action"] == "HA2" for line in lines)
        assert (tmp_path / "s.config.json").exists()

    def test_repeat_runs_are_byte_identical(self, runner, tmp_path):
        a = simulate_log(runner, tmp_path, "a.jsonl")
        b = simulate_log(runner, tmp_path, "b.jsonl")
        assert a.read_bytes() == b.read_bytes()

    def test_cpt_agent_produces_monotone_trend(self, runner, tmp_path):
        out = tmp_path / "cpt.jsonl"
        result = runner.invoke(main, [
            "simulate", "--agent", "cpt", "--theta", "0.67,0.53,1.30,9.21",
            "--seed", "3", "--out", str(out)])
        assert result.exit_code == 0, result.output
        fit_out = tmp_path / "fit.json"
        result = runner.invoke(main, [
            "fit", "--in", str(out), "--out", str(fit_out), "--no-posterior"])
        assert result.exit_code == 0, result.output
        doc = json.loads(fit_out.read_text())["participants"][0]
        pooled = {}
        for point in doc["empirical"]:
            n1n2 = pooled.setdefault(point["pR"], [0.0, 0.0])
            n1n2[0] += point["p2"] * point["nTrials"]
            n1n2[1] += point["nTrials"]
        levels = sorted(pooled)
        rates = [pooled[p][0] / pooled[p][1] for p in levels]
        assert all(b >= a - 0.06 for a, b in zip(rates, rates[1:]))
        assert rates[-1] > rates[0]

    def test_descending_order_flag(self, runner, tmp_path):
        out = tmp_path / "d.jsonl"
        result = runner.invoke(main, [
            "simulate", "--agent", "always-ha2", "--order", "descending",
            "--seed", "2", "--out", str(out)])
        assert result.exit_code == 0
        first = json.loads(out.read_text().splitlines()[0])
        assert first["p_r"] == 0.9

    @pytest.mark.parametrize("args", [
        ["simulate", "--agent", "warp", "--out", "x.jsonl"],
        ["simulate", "--agent", "cpt", "--out", "x.jsonl"],
        ["simulate", "--agent", "cpt", "--theta", "1,2", "--out", "x.jsonl"],
        ["simulate", "--agent", "cpt", "--theta", "9,9,9,9", "--out", "x.jsonl"],
        ["simulate", "--agent", "threshold", "--out", "x.jsonl"],
        ["simulate", "--agent", "threshold", "--threshold", "1.5", "--out", "x.jsonl"],
        ["simulate", "--agent", "blr", "--out", "x.jsonl"],
        ["simulate", "--agent", "always-ha2"],
    ])
    def test_usage_errors_exit_2(self, runner, tmp_path, args):
        with runner.isolated_filesystem(temp_dir=tmp_path):
            result = runner.invoke(main, args)
        assert result.exit_code == 2, result.output


class TestFit:
    def test_all_ha2_log_hits_intercept_cap(self, runner, tmp_path):
        log = simulate_log(runner, tmp_path)
        result = runner.invoke(main, ["fit", "--in", str(log), "--no-posterior"])
        assert result.exit_code == 0, result.output
        doc = json.loads(result.output)["participants"][0]
        assert doc["blrMap"]["intercept"] == pytest.approx(10.0)
        assert doc["cptFit"]["params"]["effortCost"] == pytest.approx(0.01)
        assert doc["cluster"] == "AlwaysCompensate"
        assert doc["blrPosterior"] is None

    def test_fit_writes_output_file(self, runner, tmp_path):
        log = simulate_log(runner, tmp_path)
        fit_out = tmp_path / "report.json"
        result = runner.invoke(main, [
            "fit", "--in", str(log), "--out", str(fit_out), "--no-posterior"])
        assert result.exit_code == 0
        doc = json.loads(fit_out.read_text())
        assert len(doc["participants"]) == 1
        params = doc["participants"][0]["cptFit"]["params"]
        assert set(params) == {"alpha", "beta", "effortCost", "determinism"}

    def test_multiple_inputs(self, runner, tmp_path):
        a = simulate_log(runner, tmp_path, "a.jsonl")
        b = simulate_log(runner, tmp_path, "b.jsonl")
        result = runner.invoke(main, [
            "fit", "--in", str(a), "--in", str(b), "--no-posterior"])
        assert result.exit_code == 0
        assert len(json.loads(result.output)["participants"]) == 2

    def test_malformed_line_reported_with_line_number(self, runner, tmp_path):
        log = simulate_log(runner, tmp_path)
        lines = log.read_text().splitlines()
        lines[2] = "{broken"
        bad = tmp_path / "bad.jsonl"
        bad.write_text("\n".join(lines) + "\n")
        result = runner.invoke(main, ["fit", "--in", str(bad), "--no-posterior"])
        assert result.exit_code == 1
        assert "line 3" in result.output

    def test_empty_input_reports_no_trials(self, runner, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        result = runner.invoke(main, ["fit", "--in", str(empty), "--no-posterior"])
        assert result.exit_code == 1
        assert "no trials" in result.output

    def test_missing_input_file_is_usage_error(self, runner, tmp_path):
        result = runner.invoke(main, [
            "fit", "--in", str(tmp_path / "ghost.jsonl"), "--no-posterior"])
        assert result.exit_code == 2

    def test_posterior_included_by_default(self, runner, tmp_path):
        log = simulate_log(runner, tmp_path)
        result = runner.invoke(main, [
            "fit", "--in", str(log), "--chains", "2", "--warmup", "200",
            "--samples", "200"])
        assert result.exit_code == 0, result.output
        doc = json.loads(result.output)["participants"][0]
        assert doc["blrPosterior"] is not None
        assert doc["blrPosterior"]["algorithm"] == "nuts"

import csv as csv_module
import io
import json

import pytest
from click.testing import CliRunner

import digitprod.cli as cli
from digitprod.upper_bounds import NonconvergenceError


@pytest.fixture()
def runner():
    return CliRunner()


class TestUpper:
    def test_base_10_reports_published_constants(self, runner):
        result = runner.invoke(cli.main, ["upper", "--base", "10"])
        assert result.exit_code == 0
        assert "1.2869847153" in result.output
        assert "0.7869364081" in result.output
        assert "1.3921885603" in result.output
        assert "0.7167169840" in result.output

    def test_base_3_all_closed_form(self, runner):
        result = runner.invoke(cli.main, ["upper", "--base", "3", "--variant", "all"])
        assert result.exit_code == 0
        assert "0.6309297536" in result.output

    def test_base_2_rejected_with_exit_2(self, runner):
        result = runner.invoke(cli.main, ["upper", "--base", "2"])
        assert result.exit_code == 2
        assert ">= 3" in result.output + (result.stderr or "")

    def test_prior_bounds_footnote_quoted_only(self, runner):
        result = runner.invoke(cli.main, ["upper", "--base", "10"])
        assert "quoted, not computed" in result.output
        assert "0.122" in result.output and "0.901" in result.output
        base3 = runner.invoke(cli.main, ["upper", "--base", "3"])
        assert "quoted" not in base3.output

    def test_nonconvergence_maps_to_exit_3(self, runner, monkeypatch):
        def explode(ctx, variant):
            raise NonconvergenceError("bad", (0.0, 1.0))

        monkeypatch.setattr(cli, "solve_upper", explode)
        result = runner.invoke(cli.main, ["upper", "--base", "10"])
        assert result.exit_code == 3


class TestLower:
    def test_reference_alphas(self, runner):
        result = runner.invoke(
            cli.main,
            ["lower", "--base", "10", "--alphas", "1.331,1.331,0.476,0,0.170,1,0,0,0.060,0"],
        )
        assert result.exit_code == 0
        assert "0.5260406561" in result.output
        assert "evaluated" in result.output

    def test_prime_base_flagged_as_limit(self, runner):
        result = runner.invoke(cli.main, ["lower", "--base", "7"])
        assert result.exit_code == 0
        assert "0.3562071871" in result.output
        assert "supremum (limit)" in result.output

    def test_infeasible_alphas_exit_2_with_violation(self, runner):
        result = runner.invoke(
            cli.main,
            ["lower", "--base", "10", "--alphas", "0,0,0,0,0,0,0,0,0,0.5"],
        )
        assert result.exit_code == 2
        assert "support d=9" in (result.stderr or result.output)

    def test_wrong_length_alphas_exit_2(self, runner):
        result = runner.invoke(cli.main, ["lower", "--base", "10", "--alphas", "1,2,3"])
        assert result.exit_code == 2


class TestCount:
    @pytest.mark.parametrize(
        "args,want",
        [
            (["--base", "10", "--variant", "nonzero", "--x", "20"], "14"),
            (["--base", "10", "--variant", "all", "--x", "20"], "12"),
            (["--base", "3", "--variant", "nonzero", "--x", "10"], "8"),
        ],
    )
    def test_hand_counts(self, runner, args, want):
        result = runner.invoke(cli.main, ["count", *args, "--format", "json"])
        assert result.exit_code == 0
        row = json.loads(result.output.strip())
        assert row["count"] == int(want)

    def test_digit_budget_exit_2(self, runner):
        result = runner.invoke(
            cli.main, ["count", "--base", "10", "--x", str(10**19), "--method", "hybrid"]
        )
        assert result.exit_code == 2

    def test_deterministic_output(self, runner):
        args = ["count", "--base", "10", "--variant", "nonzero", "--x", "4321", "--format", "csv"]
        first = runner.invoke(cli.main, args)
        second = runner.invoke(cli.main, args)
        assert first.output == second.output

    def test_cache_round_trip(self, runner, tmp_path):
        cache = str(tmp_path / "counts.txt")
        args = ["count", "--base", "10", "--x", "20", "--cache", cache, "--format", "json"]
        first = runner.invoke(cli.main, args)
        assert json.loads(first.output)["method"] in ("brute", "auto")
        second = runner.invoke(cli.main, args)
        row = json.loads(second.output)
        assert row["method"] == "cache"
        assert row["count"] == 14

    def test_env_threshold_respected(self, runner):
        result = runner.invoke(
            cli.main,
            ["count", "--base", "10", "--x", "500", "--method", "hybrid", "--format", "json"],
            env={"DIGITPROD_THRESHOLD": "1"},
        )
        assert result.exit_code == 0
        # 59 frozen from a per-integer membership loop
        assert json.loads(result.output)["count"] == 59
        # an invalid threshold arriving via the environment proves it is read
        broken = runner.invoke(
            cli.main,
            ["count", "--base", "10", "--x", "500", "--method", "hybrid"],
            env={"DIGITPROD_THRESHOLD": "0"},
        )
        assert broken.exit_code == 2

    def test_env_oracle_ceiling_respected(self, runner):
        result = runner.invoke(
            cli.main,
            ["count", "--base", "10", "--x", "100", "--method", "brute"],
            env={"DIGITPROD_ORACLE_CEILING": "10"},
        )
        assert result.exit_code == 2
        assert "hybrid" in (result.stderr or result.output)


class TestFormats:
    def test_json_lines_round_trip(self, runner):
        result = runner.invoke(cli.main, ["upper", "--base", "10", "--format", "json"])
        lines = [l for l in result.output.strip().splitlines() if l]
        assert len(lines) == 2
        for line in lines:
            row = json.loads(line)
            assert json.dumps(row) == line
            assert f"{row['eta']:.10f}".rstrip("0") in line

    def test_csv_round_trip(self, runner):
        result = runner.invoke(cli.main, ["upper", "--base", "10", "--format", "csv"])
        rows = list(csv_module.reader(io.StringIO(result.output)))
        header, data = rows[0], rows[1:]
        assert header[:2] == ["base", "variant"]
        eta_idx = header.index("eta")
        for row in data:
            assert f"{float(row[eta_idx]):.10f}" == row[eta_idx]

    def test_table_default(self, runner):
        result = runner.invoke(cli.main, ["count", "--base", "10", "--x", "20"])
        assert "count" in result.output
        assert "14" in result.output

    def test_output_file(self, runner, tmp_path):
        path = str(tmp_path / "out.json")
        result = runner.invoke(
            cli.main, ["count", "--base", "10", "--x", "20", "--format", "json", "--output", path]
        )
        assert result.exit_code == 0
        assert json.loads(open(path).read())["count"] == 14


class TestWitnessCommand:
    def test_explicit_profile(self, runner):
        result = runner.invoke(
            cli.main,
            ["witness", "--base", "10", "--x", "100", "--alphas", "0,1,0,0,0,0,0,0,0,0",
             "--sample", "3", "--format", "json"],
        )
        assert result.exit_code == 0
        rows = [json.loads(l) for l in result.output.strip().splitlines()]
        assert all(row["n"] == 10 and row["s"] == 1 for row in rows)

    def test_prime_base_default_profile(self, runner):
        result = runner.invoke(
            cli.main, ["witness", "--base", "7", "--x", str(7**8), "--sample", "4", "--format", "json"]
        )
        assert result.exit_code == 0
        rows = [json.loads(l) for l in result.output.strip().splitlines()]
        assert len(rows) == 4

    def test_x_too_small_exit_2(self, runner):
        result = runner.invoke(
            cli.main, ["witness", "--base", "10", "--x", "5", "--alphas", "0,1,0,0,0,0,0,0,0,0"]
        )
        assert result.exit_code == 2

    def test_seeded_determinism(self, runner):
        args = ["witness", "--base", "10", "--x", str(10**9), "--sample", "5", "--seed", "11",
                "--alphas", "1.331,1.331,0.476,0,0.170,1,0,0,0.060,0", "--format", "csv"]
        assert runner.invoke(cli.main, args).output == runner.invoke(cli.main, args).output


class TestSlopeAndSmooth:
    def test_slope_rows(self, runner):
        result = runner.invoke(
            cli.main,
            ["slope", "--base", "10", "--variant", "nonzero", "--kmin", "1", "--kmax", "3",
             "--format", "json"],
        )
        rows = [json.loads(l) for l in result.output.strip().splitlines()]
        assert [(r["k"], r["count"]) for r in rows] == [(1, 10), (2, 24), (3, 74)]
        assert rows[-1]["slope"] == ""

    def test_smooth_listing(self, runner):
        result = runner.invoke(
            cli.main, ["smooth", "--base", "10", "--limit", "20", "--format", "csv"]
        )
        rows = list(csv_module.reader(io.StringIO(result.output)))
        values = [int(r[0]) for r in rows[1:]]
        assert values == [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 14, 15, 16, 18, 20]
        assert rows[1:][5][1] == "2^1*3^1"


class TestVerify:
    def test_quick_verify_passes(self, runner, tmp_path):
        goldens = str(tmp_path / "goldens.json")
        result = runner.invoke(cli.main, ["verify", "--quick", "--goldens", goldens])
        assert result.exit_code == 0, result.output
        assert "FAIL" not in result.output
        assert "PASS" in result.output

    def test_extra_base_goldens_recorded_then_compared(self, runner, tmp_path):
        goldens = str(tmp_path / "goldens.json")
        first = runner.invoke(
            cli.main, ["verify", "--quick", "--base", "12", "--goldens", goldens]
        )
        assert first.exit_code == 0
        assert "recorded" in first.output
        stored = json.loads(open(goldens).read())
        assert "12" in stored
        second = runner.invoke(
            cli.main, ["verify", "--quick", "--base", "12", "--goldens", goldens]
        )
        assert second.exit_code == 0
        assert "recorded" not in second.output

import json
import subprocess
import sys
from fractions import Fraction

from maxminfair import validate_instance
from maxminfair.cli import (
    EXIT_BUDGET,
    EXIT_FAIL,
    EXIT_INFEASIBLE,
    EXIT_INPUT,
    EXIT_OK,
    main,
)

from conftest import make_instance

F = Fraction


def write_instance(tmp_path, instance, name="instance.json"):
    path = tmp_path / name
    path.write_text(json.dumps(instance.to_json_dict()))
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


class TestGen:
    def test_deterministic(self, capsys, tmp_path):
        code1, payload1 = run_cli(
            capsys, "gen", "--players", "3", "--resources", "5", "--seed", "9"
        )
        code2, payload2 = run_cli(
            capsys, "gen", "--players", "3", "--resources", "5", "--seed", "9"
        )
        assert code1 == code2 == EXIT_OK
        assert payload1 == payload2
        inst = validate_instance(payload1)
        assert inst.num_players == 3 and inst.num_resources == 5

    def test_all_kinds_validate(self, capsys):
        for kind in ("uniform", "fat-thin-mix", "clustered-desire"):
            code, payload = run_cli(
                capsys,
                "gen", "--kind", kind, "--players", "4", "--resources", "7",
            )
            assert code == EXIT_OK
            validate_instance(payload)

    def test_bad_counts(self, capsys):
        code = main(["gen", "--players", "0", "--resources", "3"])
        assert code == EXIT_INPUT

    def test_writes_instance_file(self, tmp_path):
        out = tmp_path / "generated.json"
        code = main(
            ["gen", "--players", "2", "--resources", "4", "--out", str(out)]
        )
        assert code == EXIT_OK
        validate_instance(json.loads(out.read_text()))


class TestSolve:
    def test_two_fat_auto(self, capsys, tmp_path, two_fat):
        inst_path = write_instance(tmp_path, two_fat)
        out_path = str(tmp_path / "allocation.json")
        code, report = run_cli(
            capsys, "solve", "--instance", inst_path, "--out", out_path
        )
        assert code == EXIT_OK
        assert report["outcome"] == "Allocated"
        assert report["t_star"] == {"mode": "exact", "value": "1"}
        assert report["min_value"] == "1"
        assert report["ratio"] == "1"
        allocation = json.loads(open(out_path).read())
        assert set(allocation["allocation"]) == {"p1", "p2"}

    def test_shared_single_forced_target(self, capsys, tmp_path, shared_single):
        inst_path = write_instance(tmp_path, shared_single)
        code, report = run_cli(
            capsys, "solve", "--instance", inst_path, "--target", "1"
        )
        assert code == EXIT_INFEASIBLE
        assert report["outcome"] == "Certified-Infeasible"
        cert = report["certificate"]
        assert cert["objective"] == "15/23"
        assert cert["feasibility_check"]["passed"]
        assert cert["balance_check"]["passed"]

    def test_ten_thin_auto(self, capsys, tmp_path, ten_thin):
        inst_path = write_instance(tmp_path, ten_thin)
        code, report = run_cli(capsys, "solve", "--instance", inst_path)
        assert code == EXIT_OK
        assert report["outcome"] == "Allocated"
        # The matched bundle is three tenths; leftovers then flow to the
        # only player, so the full allocation is worth 1.
        assert F(report["min_value"]) >= F(6, 23)

    def test_trace_file(self, capsys, tmp_path, two_fat):
        inst_path = write_instance(tmp_path, two_fat)
        trace_path = tmp_path / "trace.jsonl"
        code, _ = run_cli(
            capsys, "solve", "--instance", inst_path, "--trace", str(trace_path)
        )
        assert code == EXIT_OK
        rows = [json.loads(line) for line in trace_path.read_text().splitlines()]
        assert rows
        assert {"step", "kind", "player", "bundle", "blocker_index", "signature"} <= set(
            rows[0]
        )
        assert all(row["signature"][-1] == "inf" for row in rows)

    def test_missing_file(self, capsys):
        assert main(["solve", "--instance", "/does/not/exist.json"]) == EXIT_INPUT

    def test_malformed_json(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["solve", "--instance", str(bad)]) == EXIT_INPUT

    def test_explicit_zero_target(self, capsys, tmp_path, shared_single):
        inst_path = write_instance(tmp_path, shared_single)
        code, report = run_cli(
            capsys, "solve", "--instance", inst_path, "--target", "0"
        )
        assert code == EXIT_OK
        assert report["outcome"] == "Allocated"

    def test_bracket_fallback_on_tiny_budget(self, capsys, tmp_path, ten_thin):
        inst_path = write_instance(tmp_path, ten_thin)
        code, report = run_cli(
            capsys,
            "solve", "--instance", inst_path,
            "--budget", "4", "--delta", "1/8",
        )
        assert code == EXIT_OK
        assert report["outcome"] == "Allocated"
        assert report["t_star"]["mode"] == "bracket"
        lo = F(report["t_star"]["feasible"])
        assert F(7, 8) <= lo <= 1  # true optimum is 1
        assert report["ratio"] is None
        assert F(report["min_value"]) >= F(6, 23) * lo


class TestVerify:
    def test_pipeline_allocation_passes(self, capsys, tmp_path, two_fat):
        inst_path = write_instance(tmp_path, two_fat)
        out_path = str(tmp_path / "allocation.json")
        run_cli(capsys, "solve", "--instance", inst_path, "--out", out_path)
        code, report = run_cli(
            capsys,
            "verify",
            "--instance", inst_path,
            "--allocation", out_path,
            "--threshold", "6/23",
        )
        assert code == EXIT_OK
        assert report["passed"] is True

    def test_threshold_failure(self, capsys, tmp_path):
        inst = make_instance({"a": "1"}, {"p1": ["a"], "p2": ["a"]})
        inst_path = write_instance(tmp_path, inst)
        alloc_path = tmp_path / "alloc.json"
        alloc_path.write_text(json.dumps({"allocation": {"p1": ["a"], "p2": []}}))
        code, report = run_cli(
            capsys,
            "verify",
            "--instance", inst_path,
            "--allocation", str(alloc_path),
            "--threshold", "1/2",
        )
        assert code == EXIT_FAIL
        assert report["passed"] is False
        assert report["min_value"] == "0"

    def test_not_a_partition(self, capsys, tmp_path, two_fat):
        inst_path = write_instance(tmp_path, two_fat)
        alloc_path = tmp_path / "alloc.json"
        alloc_path.write_text(json.dumps({"allocation": {"p1": ["a", "b"], "p2": ["a"]}}))
        code = main(
            ["verify", "--instance", inst_path, "--allocation", str(alloc_path)]
        )
        assert code == EXIT_INPUT


class TestGap:
    def test_deterministic_table(self, capsys):
        args = [
            "gap", "--players", "3", "--resources", "5",
            "--trials", "4", "--seed", "3",
        ]
        code1, table1 = run_cli(capsys, *args)
        code2, table2 = run_cli(capsys, *args)
        assert code1 == code2 == EXIT_OK
        assert table1 == table2
        assert len(table1["rows"]) == 4
        for row in table1["rows"]:
            if not row["degenerate"]:
                assert F(row["gap"]) <= F(23, 6)
                assert F(row["ratio"]) >= F(6, 23)

    def test_budget_exit(self, capsys):
        code = main(
            ["gap", "--players", "7", "--resources", "4", "--trials", "1"]
        )
        assert code == EXIT_BUDGET


def test_module_entry_point(tmp_path, two_fat):
    inst_path = write_instance(tmp_path, two_fat)
    proc = subprocess.run(
        [sys.executable, "-m", "maxminfair", "solve", "--instance", inst_path],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == EXIT_OK
    assert json.loads(proc.stdout)["outcome"] == "Allocated"

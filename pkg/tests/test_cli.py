import json
import subprocess
import sys

import pytest

from diamond_constants.cli import main, parse_j_rho, parse_range
from diamond_constants.params import sample


def test_parsers():
    assert parse_range("1..4") == [1, 2, 3, 4]
    assert parse_range("2") == [2]
    assert parse_range("1,3") == [1, 3]
    assert [R.to_list() for R in parse_j_rho("every", 2)] == [[], [0], [1]]
    assert parse_j_rho("0,2", 3)[0].to_list() == [0, 2]
    assert parse_j_rho("full", 2)[0].is_full()


def test_lemma_example_passes(capsys):
    assert main(["verify", "lemma", "t+t+s", "--f", "1..4", "--trials", "3"]) == 0
    assert "t-t-s  pass=" in capsys.readouterr().out


def test_theorem_example_prints_the_invariant_table(capsys):
    assert main(["verify", "theorem", "--f", "2", "--j-rho", "0", "--seed", "42"]) == 0
    out = capsys.readouterr().out
    assert "invariants at hash=" in out and "empty:" in out and "J*" in out


def test_mutated_run_fails(capsys):
    assert main(["verify", "lemma", "up-closed", "--mutate", "d"]) == 1
    assert "FAIL up-closed" in capsys.readouterr().out


def test_table_mutation_fails():
    assert main(["verify", "lemma", "up-prime", "--f", "2", "--mutate", "table",
                 "--table-case", "Y"]) == 1


def test_json_report_and_report_command(tmp_path, capsys):
    out = tmp_path / "report.json"
    rc = main(["verify", "lemma", "jab", "mu-jstar", "--f", "2", "--format", "json",
               "--output", str(out)])
    assert rc == 0
    data = json.loads(out.read_text())
    assert set(data) == {"tool-version", "config", "checks"}
    assert {c["slug"] for c in data["checks"]} == {"jab", "mu-jstar"}
    assert all(len(c["params"]["hash"]) == 12 for c in data["checks"])
    assert main(["report", str(out)]) == 0
    assert main(["report", str(out), "--format", "json"]) == 0
    assert '"ok": true' in capsys.readouterr().out


def test_report_of_a_failing_run(tmp_path):
    out = tmp_path / "bad.json"
    main(["verify", "lemma", "up-closed", "--f", "3", "--mutate", "d", "--format", "json",
          "--output", str(out)])
    assert main(["report", str(out)]) == 1


def test_params_file(tmp_path):
    ps = sample(31, 2, [1], seed=9)
    path = tmp_path / "ps.json"
    path.write_text(json.dumps(ps.to_json()))
    assert main(["verify", "theorem", "--params-file", str(path)]) == 0


@pytest.mark.parametrize("argv", [
    ["verify", "lemma", "no-such-slug"],
    ["verify", "lemma", "jab", "--p", "23", "--f", "2"],
    ["verify", "lemma", "jab", "--p", "30"],
    ["verify", "lemma", "jab", "--f", "2", "--j-rho", "5"],
    ["verify", "lemma", "jab", "--f", "2", "--r", "13"],
    ["verify", "lemma", "jab", "--f", "1", "--r", "20"],
    ["verify", "lemma", "jab", "--params-file", "/nonexistent.json"],
    ["verify", "lemma", "jab", "--f", "4..1"],
    ["report", "/nonexistent.json"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_relaxed_mode_accepts_small_primes():
    assert main(["verify", "lemma", "compare-sj", "--p", "7", "--f", "2", "--mode", "relaxed"]) == 0


def test_params_command(capsys):
    assert main(["params", "--f", "2", "--j-rho", "0", "--trials", "2"]) == 0
    assert len(capsys.readouterr().out.strip().splitlines()) == 2
    assert main(["params", "--f", "1", "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)[0]["p"] == 29


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "diamond_constants", "verify", "lemma", "j-star",
                          "--f", "2"], capture_output=True, text=True)
    assert res.returncode == 0 and "OK" in res.stdout

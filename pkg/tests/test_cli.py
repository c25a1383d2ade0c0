import json
import subprocess
import sys

from irrconn.cli import EXIT_IDENTITY, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_USAGE, main

RANK_ONE = json.dumps({"g": 1, "divisor": ["p:1"], "gamma": {"r": 1, "parts": [["p", 1, 1]]},
                       "d": 0, "eps": "1", "zeta": [["p", 1, ["0"]]], "kind": "full"})


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_help_and_bad_arguments(capsys):
    assert run(capsys, "--help")[0] == EXIT_OK
    assert run(capsys, "frobnicate")[0] == EXIT_USAGE
    assert run(capsys, "conn-class", "--no-cache")[0] == EXIT_USAGE
    code, _, err = run(capsys, "omega", "--divisor", "p:-1", "--no-cache")
    assert code == EXIT_USAGE and "error" in err
    assert run(capsys, "ddp", "--case", "1,x,1", "--no-cache")[0] == EXIT_USAGE
    assert run(capsys, "conn-class", "--query", "{not json", "--no-cache")[0] == EXIT_USAGE


def test_conn_class_json_and_csv(capsys, tmp_path):
    code, out, _ = run(capsys, "conn-class", "--query", RANK_ONE, "--no-cache")
    assert code == EXIT_OK
    row = json.loads(out)["results"][0]
    assert row["value"] == "(qh^4 - qh^4*a1^-1 - qh^2*a1 + qh^2)/(qh^2 - 1)"
    qfile = tmp_path / "q.json"
    qfile.write_text(RANK_ONE)
    target = tmp_path / "out.csv"
    code, out, _ = run(capsys, "conn-class", "--query", str(qfile), "--format", "csv", "--out", str(target),
                       "--no-cache")
    assert code == EXIT_OK and out == ""
    lines = target.read_text().splitlines()
    assert lines[0] == "query,value" and lines[1].endswith(row["value"])


def test_vanishing_class_is_not_an_error(capsys):
    q = json.loads(RANK_ONE)
    q["zeta"] = [["p", 1, ["1/2"]]]
    code, out, _ = run(capsys, "conn-class", "--query", json.dumps(q), "--no-cache")
    assert code == EXIT_OK and json.loads(out)["results"][0]["value"] == "0"


def test_inadmissible_query(capsys):
    q = {"g": 1, "divisor": ["p:2"], "gamma": {"r": 2, "parts": [["p", 1, 1], ["p", 2, 1]]},
         "d": 0, "eps": "1", "zeta": [["p", 1, ["1", "0"]], ["p", 2, ["1", "0"]]], "kind": "full"}
    assert run(capsys, "conn-class", "--query", json.dumps(q), "--no-cache")[0] == EXIT_USAGE


def test_check_mellit_exit_codes(capsys):
    code, out, _ = run(capsys, "check-mellit", "--genus", "1", "--points", "1", "--delta", "1", "--zmax", "20",
                       "--no-cache")
    assert code == EXIT_OK and json.loads(out)["status"] == "equal"
    code, _, _ = run(capsys, "check-mellit", "--genus", "2", "--points", "1", "--delta", "2", "--zmax", "8",
                     "--no-cache")
    assert code == EXIT_INCONCLUSIVE


def test_ddp_reports_non_palindromic(capsys):
    code, out, _ = run(capsys, "ddp", "--case", "1,2,1", "--no-cache")
    case = json.loads(out)["cases"][0]
    assert case["H"] == "t^4 - 2*t^3 + t^2" and case["d"] == 2
    assert code == (EXIT_OK if case["palindromic"] else EXIT_IDENTITY)


def test_epoly_routes_agree(capsys):
    outs = [run(capsys, "epoly", "--query", RANK_ONE, "--route", r, "--no-cache")[1] for r in ("substitution", "kernel")]
    assert json.loads(outs[0])["results"][0]["value"] == json.loads(outs[1])["results"][0]["value"]


def test_cache_hit_miss_and_corruption(capsys, tmp_path, caplog):
    argv = ["check-mellit", "--genus", "1", "--points", "1", "--delta", "1", "--zmax", "20",
            "--cache-dir", str(tmp_path)]
    with caplog.at_level("INFO"):
        cold = run(capsys, *argv)
        assert any("cache miss" in r.getMessage() for r in caplog.records)
        caplog.clear()
        warm = run(capsys, *argv)
        assert any("cache hit" in r.getMessage() for r in caplog.records)
    caplog.clear()
    files = list(tmp_path.glob("kernels-*.json"))
    assert cold[0] == EXIT_OK and len(files) == 1
    assert warm[1] == cold[1]
    files[0].write_text("{ truncated")
    with caplog.at_level("WARNING"):
        again = run(capsys, *argv)
    assert again[0] == EXIT_OK and again[1] == cold[1]
    assert any("corrupt" in r.getMessage() for r in caplog.records)
    assert json.loads(files[0].read_text())
    assert not list(tmp_path.glob("*.tmp"))


def test_cache_env_var(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("IRRCONN_CACHE_DIR", str(tmp_path))
    assert run(capsys, "kernels", "--genus", "1", "--zmax", "20")[0] == EXIT_OK
    assert list(tmp_path.glob("kernels-*.json"))


def test_selftest_deterministic_in_subprocess(tmp_path):
    def once():
        return subprocess.run([sys.executable, "-m", "irrconn", "selftest", "--cache-dir", str(tmp_path)],
                              capture_output=True, check=False)

    cold, warm = once(), once()
    assert cold.returncode == warm.returncode == EXIT_OK
    assert cold.stdout == warm.stdout

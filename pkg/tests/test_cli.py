import json
import subprocess
import sys
from pathlib import Path

import pytest

from autoseq.cli import main
from autoseq.report import validate

DEMOS = Path(__file__).resolve().parent.parent / "demos"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def json_of(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    doc = json.loads(out)
    validate(doc)
    return code, doc


def test_expand_outputs(capsys):
    assert run(capsys, "expand", "--morphism", str(DEMOS / "tm.morph"), "--length", "16")[1] == "0110100110010110\n"
    assert run(capsys, "expand", "--morphism", str(DEMOS / "fib.morph"), "--length", "8")[1] == "01001010\n"
    code, out, _ = run(capsys, "expand", "--morphism", str(DEMOS / "fib.morph"), "--length", "0")
    assert code == 0 and out.strip() == ""


def test_analyze_fibonacci_to_file(capsys, tmp_path):
    out = tmp_path / "out.json"
    code, human, _ = run(capsys, "analyze", "--morphism", str(DEMOS / "fib.morph"),
                         "--horizon", "2^16", "--json", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    validate(doc)
    assert doc["verdict"]["conclusion"] == "NotAutomaticAny" and doc["verdict"]["certified"]
    assert "NotAutomaticAny" in human


def test_analyze_squares_advisory(capsys):
    code, doc = json_of(capsys, "analyze", "--seq", "poly:1,0,0", "--bases", "2,3")
    assert code == 0
    assert doc["verdict"]["conclusion"] == "NotAutomaticAny"
    assert doc["verdict"]["grade"] == "advisory"


def test_missing_file_exit_2(capsys):
    code, _, err = run(capsys, "analyze", "--morphism", "missing.morph")
    assert code == 2 and "error" in err


def test_two_inputs_exit_2(capsys):
    code, _, _ = run(capsys, "expand", "--morphism", str(DEMOS / "tm.morph"), "--seq", "primes", "--length", "4")
    assert code == 2


def test_bad_generator_exit_2(capsys):
    assert run(capsys, "analyze", "--seq", "nope")[0] == 2


def test_usage_error_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["analyze", "--bases", "1"])
    assert exc.value.code == 2


def test_kernel_aab_family(capsys):
    code, doc = json_of(capsys, "kernel", "--morphism", str(DEMOS / "aab.morph"), "--q", "2",
                        "--family", "qk-k", "--kmax", "8")
    assert code == 0
    est = doc["payloads"]["kernel"]
    assert est["size"] == 8 and est["family"] == "qk-k"


def test_kernel_uniform_exact(capsys):
    code, doc = json_of(capsys, "kernel", "--morphism", str(DEMOS / "tm.morph"), "--q", "2", "--kmax", "6",
                        "--horizon", "2^14")
    assert code == 0
    assert doc["payloads"]["exact"]["kernel_size"] == 2


def test_complexity_fibonacci(capsys):
    code, doc = json_of(capsys, "complexity", "--morphism", str(DEMOS / "fib.morph"), "--nmax", "30",
                        "--horizon", "2^14")
    assert code == 0
    assert doc["payloads"]["complexity"]["complexity"] == [n + 1 for n in range(1, 31)]


def test_dynamics_m211(capsys):
    code, doc = json_of(capsys, "dynamics", "--morphism", str(DEMOS / "m211.morph"))
    assert code == 0
    per_q = {s["q"]: s for s in doc["payloads"]["obstruction"]["per_q"]}
    assert per_q[2]["status"] == "Obstructed" and per_q[2]["evidence"]["forces_j"] == 0
    code, human, _ = run(capsys, "dynamics", "--morphism", str(DEMOS / "m211.morph"))
    assert "forcing j = 0" in human


def test_dynamics_requires_morphism(capsys):
    assert run(capsys, "dynamics", "--seq", "primes")[0] == 2


def test_gaps_squares(capsys):
    code, doc = json_of(capsys, "gaps", "--seq", "poly:1,0,0", "--symbol", "1")
    assert code == 0
    gap = [g for g in doc["payloads"]["gaps"] if g["profile"]["symbol"] == "1"]
    assert gap[0]["kind"] == "FailsBoth"
    assert doc["payloads"]["ratio"][0]["kind"] == "RatioTendsToOne"


def test_frequencies_m211(capsys):
    code, doc = json_of(capsys, "frequencies", "--morphism", str(DEMOS / "m211.morph"))
    assert code == 0
    assert sorted(doc["payloads"]["frequencies"]["exact"]) == ["1/2", "1/2"]


def test_prefix_file(capsys, tmp_path):
    f = tmp_path / "p.txt"
    f.write_text("0001" + "10" * 10000 + "\n")
    code, doc = json_of(capsys, "analyze", "--prefix", str(f))
    assert code == 0
    assert doc["verdict"]["conclusion"] == "UltimatelyPeriodic"


def test_byte_identical_modulo_timings(capsys):
    def strip(doc):
        doc.pop("timings", None)
        return json.dumps(doc, sort_keys=True)
    _, a = json_of(capsys, "analyze", "--morphism", str(DEMOS / "aab.morph"), "--horizon", "2^16")
    _, b = json_of(capsys, "analyze", "--morphism", str(DEMOS / "aab.morph"), "--horizon", "2^16")
    assert strip(a) == strip(b)


def test_threads_env_does_not_change_report(tmp_path):
    outs = []
    for threads in ("1", "3"):
        res = subprocess.run(
            [sys.executable, "-m", "autoseq", "analyze", "--morphism", str(DEMOS / "aab.morph"),
             "--horizon", "2^16", "--json"],
            capture_output=True, text=True, env={"AUTOSEQ_THREADS": threads, "PATH": "/usr/bin:/bin"},
        )
        assert res.returncode == 0, res.stderr
        doc = json.loads(res.stdout)
        doc.pop("timings")
        outs.append(doc)
    assert outs[0] == outs[1]

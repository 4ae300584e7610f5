import io
import json
import random
import subprocess
import sys
from pathlib import Path

import pytest

from bbbs import verify
from bbbs.cli import main
from bbbs.core import BoxBallConfiguration, parse_configuration

GOLDEN = Path(__file__).parent / "golden"
START = "F F F V V B1 U3 F"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# -- evolve ---------------------------------------------------------------------------


@pytest.mark.parametrize("cap, steps, name", [("inf", "5", "figure1.txt"), ("2", "8", "figure2.txt")])
def test_evolve_reproduces_figures(capsys, cap, steps, name):
    code, out, _ = run(capsys, "evolve", "--l", cap, "--steps", steps, "--format", "triples", START)
    assert code == 0
    assert out == (GOLDEN / name).read_text()


def test_evolve_tokens_figure1(capsys):
    code, out, _ = run(capsys, "evolve", "--l", "inf", "--steps", "5", START)
    rows = out.splitlines()
    assert code == 0 and len(rows) == 6
    assert rows[-1] == "@10 U3 U1 V V V F F F"


def test_evolve_worked_example(capsys):
    code, out, _ = run(capsys, "evolve", "--l", "inf", "--steps", "1", "--format", "triples", "(1,2,2) (2,4,3) (1,2,2)")
    assert out.splitlines() == ["(1,2,2) (2,4,3) (1,2,2)", "(2,1,0) (3,3,1) (2,3,2) (0,1,2) (0,0,1) (0,0,1)"]


def test_evolve_json_and_ascii(capsys):
    code, out, _ = run(capsys, "evolve", "--steps", "2", "--format", "json", "F F")
    doc = json.loads(out)
    assert doc["capacity"] == "inf" and [r["origin"] for r in doc["rows"]] == [0, 2, 4]
    code, out, _ = run(capsys, "evolve", "--steps", "1", "--format", "ascii", "U1")
    assert out.startswith("t=0\n") and "\\_/" in out and "[o]" in out


def test_evolve_reads_stdin_and_file(capsys, monkeypatch, tmp_path):
    monkeypatch.setattr(sys, "stdin", io.StringIO("F F\n"))
    code, out, _ = run(capsys, "evolve")
    assert code == 0 and out.splitlines() == ["F F", "@2 F F"]
    path = tmp_path / "state.txt"
    path.write_text("B1 U3 F\n")
    code, out, _ = run(capsys, "evolve", "--file", str(path))
    assert code == 0 and out.splitlines()[0] == "B1 U3 F"


@pytest.mark.parametrize(
    "argv",
    [
        ["evolve", "F X"],
        ["evolve", "(1,1,2)"],
        ["evolve", "--file", "/nonexistent/state.txt"],
        ["scatter", "F2", "F5"],
        ["scatter", "F5", "F3", "--gaps", "1"],
        ["scatter", "FU1"],
        ["trace", "F1", "B2"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and "error" in err and out == ""


@pytest.mark.parametrize("argv", [["evolve", "--l", "zero", "F"], ["evolve", "--l", "0", "F"], ["verify", "nope"], []])
def test_argparse_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


# -- scatter --------------------------------------------------------------------------


def test_scatter_figure1(capsys):
    code, out, _ = run(capsys, "scatter", "F3", "B1U3F", "--l", "inf")
    doc = json.loads(out)
    assert code == 0 and doc["ok"]
    assert [s["delta"] for s in doc["measured"]["solitons"]] == [0, 0]
    assert doc["measured"]["solitons"] and doc["predicted"]["solitons"][0]["delta"] == 0


def test_scatter_fast_fast(capsys):
    code, out, _ = run(capsys, "scatter", "F5", "F2")
    doc = json.loads(out)
    assert {s["label"]: s["delta"] for s in doc["measured"]["solitons"]} == {"F5": 4, "F2": -4}


def test_scatter_pure_basket(capsys):
    code, out, _ = run(capsys, "scatter", "F2", "B3", "--l", "2", "--format", "text")
    assert code == 0
    assert "B3: measured -1, predicted -1" in out and "F2: measured -3, predicted -3" in out
    assert out.rstrip().endswith("verdict: PASS")


def test_scatter_gaps_and_staged(capsys):
    code, out, _ = run(capsys, "scatter", "F3", "B1U3F", "--gaps", "2", "--format", "text")
    assert out.startswith("initial: F F F V V B1 U3 F")
    code, out, _ = run(capsys, "scatter", "F4", "F3", "F2", "--staged", "--format", "text")
    assert code == 0 and "F4: measured +10" in out


def test_scatter_short_horizon_exits_1(capsys):
    code, _, err = run(capsys, "scatter", "F5", "F2", "--horizon", "1")
    assert code == 1 and "HorizonTooSmall" in err


# -- verify ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "argv, line",
    [
        (["verify", "yang-baxter", "--count", "1000", "--seed", "7"], "yang-baxter: 1000/1000 pass"),
        (["verify", "unbasket", "--count", "500"], "unbasket: 500/500 pass"),
        (["verify", "commute", "--count", "500"], "commute: 500/500 pass"),
    ],
)
def test_verify_examples(capsys, argv, line):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and out.splitlines()[0] == line


@pytest.mark.parametrize("suite", ["tropical", "equivalence", "phase", "sorting", "trace"])
def test_verify_other_suites(capsys, suite):
    code, out, _ = run(capsys, "verify", suite, "--count", "20", "--seed", "1")
    assert code == 0 and " pass" in out


def test_verify_json(capsys):
    code, out, _ = run(capsys, "verify", "tropical", "--count", "10", "--format", "json")
    assert json.loads(out)[0] == {
        "suite": "tropical",
        "passed": 10,
        "total": 10,
        "ok": True,
        "counterexample": None,
        "detail": "",
        "notes": [],
    }


def test_verify_failure_prints_minimal_counterexample(capsys, monkeypatch):
    real = verify.evolve_boxball

    def broken(config, capacity):
        out = real(config, capacity)
        if config.balls >= 3:
            return BoxBallConfiguration(out.origin + 1, out.cells)
        return out

    monkeypatch.setattr(verify, "evolve_boxball", broken)
    code, out, _ = run(capsys, "verify", "unbasket", "--count", "50")
    assert code == 1
    assert "minimal counterexample:" in out
    example = out.split("minimal counterexample: ")[1].splitlines()[0]
    assert parse_configuration(example).total_balls >= 3


def test_suite_results_are_seeded():
    a = verify.run_suite("commute", seed=5, count=30)
    b = verify.run_suite("commute", seed=5, count=30)
    assert a.to_json() == b.to_json()


def test_random_configuration_bounds():
    rng = random.Random(0)
    for _ in range(200):
        c = verify.random_configuration(rng)
        assert 1 <= len(c) <= 20 or len(c) == 0
        assert all(s.b <= 3 and s.c <= s.b + 1 for s in c.sites)


# -- classify and trace ---------------------------------------------------------------


def test_classify_census(capsys):
    code, out, _ = run(capsys, "classify", "U10 B7 B8 U12 U9 F B9 F")
    assert code == 0
    assert "ball solitons: 5" in out
    assert "basket solitons: 4 amplitudes 10,7,29,9" in out


def test_classify_fast_and_not_basic(capsys):
    _, out, _ = run(capsys, "classify", "F F F")
    assert "Fast(3)" in out
    _, out, _ = run(capsys, "classify", "F U1")
    assert "NotBasic(FU)" in out


def test_classify_json(capsys):
    _, out, _ = run(capsys, "classify", "--format", "json", "F F V V V B2")
    doc = json.loads(out)
    assert doc["counts"]["basket_amplitudes"] == [2]
    assert [b["kind"] for b in doc["blocks"]] == ["Fast(2)", "Slow"]


def test_trace(capsys):
    code, out, _ = run(capsys, "trace", "F3", "B1U3F")
    assert code == 0 and "special baskets: 1, 4" in out and out.rstrip().endswith("verdict: PASS")
    code, out, _ = run(capsys, "trace", "F2", "B5", "--format", "json")
    assert json.loads(out)["violations"] == []


# -- process level --------------------------------------------------------------------


def test_module_entry_point_is_deterministic():
    cmd = [sys.executable, "-m", "bbbs", "scatter", "F4", "F3", "F2"]
    a = subprocess.run(cmd, capture_output=True, text=True, check=True)
    b = subprocess.run(cmd, capture_output=True, text=True, check=True)
    assert a.stdout == b.stdout and a.returncode == 0
    bad = subprocess.run([sys.executable, "-m", "bbbs", "evolve", "Q"], capture_output=True, text=True)
    assert bad.returncode == 2

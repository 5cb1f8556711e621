"""Command line: exit codes, output formats and determinism."""

import json

import pytest

from chirality_lab.cli import main


@pytest.fixture(autouse=True)
def _no_seed_env(monkeypatch):
    monkeypatch.delenv("CHIRALITY_LAB_SEED", raising=False)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_json(capsys):
    code, out, _ = run(capsys, "analyze", "--q", "7", "--no-timing")
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == "v1" and "timing" not in data
    rec = data["records"][0]
    assert rec["chirality"]["chiral"] and rec["chirality"]["witness_source"] == "SL3"
    assert rec["isolated"]["SL3"]["theorem_verdict"]["verdict"] == "exists"


def test_analyze_text_and_timing(capsys):
    code, out, _ = run(capsys, "analyze", "--q", "19", "--output", "text")
    assert code == 0
    assert out.startswith("q = 19: chiral=false")
    assert "disagrees" in out
    code, out, _ = run(capsys, "analyze", "--q", "5")
    assert "seconds" in json.loads(out)["timing"]


@pytest.mark.parametrize("q", ["9", "12", "27"])
def test_analyze_bad_q(capsys, q):
    code, _, err = run(capsys, "analyze", "--q", q)
    assert code == 2 and err.startswith("error:")


def test_conjugate_not_conjugate_with_trace(capsys):
    code, out, _ = run(capsys, "conjugate", "--group", "sl3", "--q", "7", "--a", "2,2,0;0,2,1;0,0,2",
                       "--b", "2,0,0;2,2,0;0,1,2", "--output", "text")
    assert code == 0
    assert out.startswith("not_conjugate (norm_criterion)")
    assert "N_A: generator 6, index 3" in out


def test_conjugate_witness_json(capsys):
    code, out, _ = run(capsys, "conjugate", "--group", "sl3", "--q", "7", "--a", "2,2,0;0,2,1;0,0,2",
                       "--b", "2,0,0;4,2,0;0,1,2", "--no-timing")
    dec = json.loads(out)["decision"]
    assert code == 0 and dec["verdict"] == "conjugate" and dec["witness"] == "0,0,6;0,3,0;5,0,0"


def test_conjugate_gl_and_u(capsys):
    code, out, _ = run(capsys, "conjugate", "--group", "gl3", "--q", "7", "--a", "2,2,0;0,2,1;0,0,2",
                       "--b", "2,0,0;2,2,0;0,1,2", "--no-timing")
    assert code == 0 and json.loads(out)["decision"]["verdict"] == "conjugate"
    code, out, _ = run(capsys, "conjugate", "--group", "u3", "--q", "5", "--a", "2,0,0;0,1,0;0,0,3",
                       "--b", "3,0,0;0,1,0;0,0,2", "--no-timing")
    assert code == 0 and json.loads(out)["decision"]["verdict"] == "conjugate"


def test_conjugate_parse_error_has_position(capsys):
    code, _, err = run(capsys, "conjugate", "--group", "sl3", "--q", "7", "--a", "1,0,0;0,q,0;0,0,1",
                       "--b", "1,0,0;0,1,0;0,0,1")
    assert code == 2 and "position 8" in err


def test_conjugate_not_in_group(capsys):
    code, _, err = run(capsys, "conjugate", "--group", "sl3", "--q", "7", "--a", "2,0,0;0,1,0;0,0,1",
                       "--b", "1,0,0;0,1,0;0,0,1")
    assert code == 2 and "not in SL" in err


def test_isolated_su3_q5(capsys):
    code, out, _ = run(capsys, "isolated", "--group", "su3", "--q", "5", "--output", "text")
    assert code == 0
    lines = out.splitlines()
    assert "isolated classes=4" in lines[0]
    tagged = {l.split(":")[0].strip(): not l.rstrip().endswith("not isolated") for l in lines[1:]}
    assert tagged == {"A(a=2+t)": True, "A1(a=2+t)": False, "A2(a=2+t)": True,
                      "A(a=2+4*t)": True, "A1(a=2+4*t)": False, "A2(a=2+4*t)": True}


def test_isolated_csv(capsys):
    code, out, _ = run(capsys, "isolated", "--group", "sl3", "--q", "7", "--output", "csv")
    rows = out.strip().splitlines()
    assert code == 0 and rows[0] == "label,alpha,rep,is_isolated,same_as" and len(rows) == 7


def test_word_s4(capsys):
    code, out, _ = run(capsys, "word", "--group", "s4", "--w", "[x,y]", "--mode", "exhaustive", "--no-timing")
    img = json.loads(out)["image"]
    assert code == 0 and img["size"] == 12 and img["symmetric"] is True


def test_word_search_and_errors(capsys):
    code, out, _ = run(capsys, "word", "--group", "c6", "--w", "x^2", "--search-length", "3", "--output", "text")
    assert code == 0 and "no_witness_within_budget" in out
    code, _, err = run(capsys, "word", "--group", "s4", "--w", "x^^2")
    assert code == 2 and "position" in err
    code, _, _ = run(capsys, "word", "--group", "s4", "--w", "[x,y]*z", "--enum-cap", "100")
    assert code == 3
    code, _, _ = run(capsys, "word", "--group", "sl2", "--q", "9", "--w", "x")
    assert code in (0, 2)


def test_determinism_and_seed_env(capsys, monkeypatch):
    argv = ["word", "--group", "sl2", "--q", "3", "--w", "[x,y]", "--mode", "sampled", "--count", "50",
            "--no-timing"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
    monkeypatch.setenv("CHIRALITY_LAB_SEED", "5")
    _, c, _ = run(capsys, *argv, "--seed", "1")
    assert json.loads(c)["config"]["seed"] == 5
    _, d, _ = run(capsys, *argv, "--seed", "5")
    assert c == d


def test_u3_membership_checked(capsys):
    code, _, err = run(capsys, "conjugate", "--group", "u3", "--q", "5", "--a", "4,0,0;0,1,0;0,0,4",
                       "--b", "1,0,0;0,4,0;0,0,4")
    assert code == 2 and "not in U" in err


def test_bad_config(capsys):
    code, _, _ = run(capsys, "analyze", "--q", "7", "--scan-cap", "0")
    assert code == 2
    with pytest.raises(SystemExit):
        main(["analyze"])


def test_verify_reports_known_failures(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "theorems", "--no-timing")
    data = json.loads(out)
    failed = sorted(c["key"] for c in data["checks"] if not c["passed"])
    assert code == 1 and failed == ["1b", "3b"]

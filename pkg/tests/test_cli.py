import re

import pytest

from conftest import DATA
from horotile.cli import main
from horotile.pattern import parse_patch

RULES = """\
alphabet: 0 1
forbidden {
cell: 0 0 1
cell: 1 0 *
cell: 1 1 1
}
"""
BAD_PATCH = "alphabet: 0 1\ncell: 0 0 1\ncell: 1 0 0\ncell: 1 1 1\n"
GOOD_PATCH = "alphabet: 0 1\ncell: 0 0 1\ncell: 1 0 0\ncell: 1 1 0\n"
UNSAT_RULES = "alphabet: 0 1\nforbidden {\ncell: 0 0 0\n}\nforbidden {\ncell: 0 0 1\n}\n"


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_normalize(capsys):
    assert run(capsys, "normalize", "abb") == (0, "(1,2)\n", "")
    assert run(capsys, "normalize", "ba")[1] == "(1,2)\n"


def test_normalize_needs_choices_above_origin(capsys):
    code, out, _ = run(capsys, "normalize", "A")
    assert (code, out) == (1, "invalid\n")
    assert run(capsys, "normalize", "A", "--choices", "1")[:2] == (0, "(-1,-1)\n")
    assert run(capsys, "normalize", "A", "--choices", "0")[1] == "(-1,0)\n"


def test_support(capsys):
    assert run(capsys, "support", "un", "20", "--count")[1] == "1048575\n"
    assert run(capsys, "support", "ln", "3", "--count")[1] == "16\n"
    assert run(capsys, "support", "un", "2")[1].split() == ["(0,0)", "(1,0)", "(1,1)"]


def test_check(capsys, files):
    rules = files("r.txt", RULES)
    code, out, _ = run(capsys, "check", "--rules", rules, "--patch", files("bad.txt", BAD_PATCH))
    assert code == 1 and "forbidden rule 0 violated at (0,0)" in out
    assert run(capsys, "check", "--rules", rules, "--patch", files("ok.txt", GOOD_PATCH))[:2] == (0, "clean\n")


def test_solve(capsys, files):
    rules = files("r.txt", RULES)
    code, out, _ = run(capsys, "solve", "--rules", rules, "--window", "0:2:0:1")
    assert code == 0
    sol = parse_patch(out)
    assert len(sol.cells) == 7
    again = files("sol.txt", out)
    assert run(capsys, "check", "--rules", rules, "--patch", again)[0] == 0
    assert run(capsys, "solve", "--rules", rules, "--window", "0:1:0:1", "--count")[1] == "6\n"
    assert run(capsys, "solve", "--rules", files("u.txt", UNSAT_RULES), "--window", "0:0:0:1")[:2] == (1, "unsat\n")


def test_solve_halfplane(capsys, files):
    rules = files("r.txt", "alphabet: 0 1 h\n")
    code, out, _ = run(capsys, "solve", "--rules", rules, "--window", "0:2:0:1", "--halfplane", "h", "--boundary", "0")
    assert code == 0
    assert "cell: 0 0 h" in out


def test_budget_error(capsys, files):
    rules = files("r.txt", RULES)
    code, _, err = run(capsys, "solve", "--rules", rules, "--window", "0:6:0:2", "--node-limit", "5", "--count")
    assert code == 2 and "budget" in err


def test_encode_and_split(capsys, files):
    code, out, _ = run(capsys, "encode", "--patch", files("p.txt", GOOD_PATCH))
    assert code == 0 and "cell: 1 0 0:1" in out
    code, out, _ = run(capsys, "split", "--pattern", files("p.txt", GOOD_PATCH), "--kmax", "2")
    assert code == 0 and len(out.splitlines()) == 2


@pytest.mark.parametrize("prop", ["1", "2", "3"])
def test_verify(capsys, prop):
    code, out, _ = run(capsys, "verify", "--prop", prop, "--n", "2", "--trials", "20")
    assert code == 0 and out


def test_verify_prop1_n3(capsys):
    assert run(capsys, "verify", "--prop", "1", "--n", "3")[0] == 0


def test_tm_mex_roundtrip(capsys):
    code, out, _ = run(capsys, "tm", "mex")
    assert code == 0
    assert out == (DATA / "mex.tm").read_text()


def test_tm_run_mex(capsys):
    code, out, _ = run(capsys, "tm", "run", "--machine", str(DATA / "mex.tm"), "--steps", "50")
    assert code == 0
    rows = [line for line in out.splitlines() if not line.startswith("tape:")]
    assert len(rows) == 51
    # some row of the diagram shows the first word followed by the separator
    assert any(re.search(r"\ba\s+\[?b\]?\s+\[?\|", line) for line in rows)
    assert out.splitlines()[-1].startswith("tape: a")


def test_tm_run_stuck(capsys):
    code, out, _ = run(capsys, "tm", "run", "--machine", str(DATA / "stuck.tm"), "--steps", "5")
    assert code == 1 and out.startswith("stuck")


def test_tm_compile(capsys):
    code, out, _ = run(capsys, "tm", "compile", "--machine", str(DATA / "halter.tm"))
    assert code == 0 and "allowed" in out
    code, out, _ = run(capsys, "tm", "compile", "--machine", str(DATA / "halter.tm"), "--seed-width", "3")
    assert code == 0 and len(parse_patch(out).cells) == 3


def layer_inputs(files):
    from horotile.pattern import serialize_patch
    import random

    from horotile.witness import WitnessConfig, avoiding_patch, planted_patch

    cfg = WitnessConfig(depth=6)
    rules = files("f.txt", "alphabet: 0 1 ≈\nforbidden {\ncell: 0 0 1\ncell: 1 0 0\ncell: 1 1 1\n}\n")
    clean = files("x.txt", serialize_patch(avoiding_patch(cfg, random.Random(0))))
    planted = files("y.txt", serialize_patch(planted_patch(cfg, random.Random(0))[0]))
    sched = files("s.txt", "zone: 0 close_at 1\nzone: 1 close_at 1\nauto\n")
    return rules, clean, planted, sched


def test_layers_build_and_check(capsys, files):
    rules, clean, planted, sched = layer_inputs(files)
    for path, expect in ((clean, 0), (planted, 1)):
        code, out, _ = run(capsys, "layers", "build", "--patch", path, "--forbidden", rules, "--schedule", sched,
                           "--halfplane", "≈", "--boundary", "0")
        assert code == 0
        built = files("l.txt", out)
        code, out, _ = run(capsys, "layers", "check", "--layers", built, "--forbidden", rules)
        assert code == expect
        assert ("qf terminal" in out) == bool(expect)


def test_render(capsys, files, tmp_path):
    out_file = tmp_path / "p.svg"
    assert run(capsys, "render", "--patch", files("p.txt", GOOD_PATCH), "--out", str(out_file))[0] == 0
    assert out_file.read_text().startswith("<svg")
    code, out, _ = run(capsys, "render", "--patch", files("p.txt", GOOD_PATCH), "--out", "-", "--labels")
    assert code == 0 and "<text" in out


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["normalize", "axb"],
        ["support", "un", "3", "--base", "nope"],
        ["check", "--rules", "/no/such/file", "--patch", "/no/such/file"],
        ["verify", "--prop", "4", "--n", "2"],
        ["solve", "--rules", "/no/such", "--window", "1:0:0:1"],
    ],
)
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_malformed_input_is_usage_error(capsys, files):
    code, _, err = run(capsys, "check", "--rules", files("r.txt", "forbidden {\n"), "--patch", files("p.txt", GOOD_PATCH))
    assert code == 2 and "line" in err


def test_output_is_deterministic(capsys, files):
    rules = files("r.txt", RULES)
    a = run(capsys, "solve", "--rules", rules, "--window", "0:3:0:2")
    b = run(capsys, "solve", "--rules", rules, "--window", "0:3:0:2")
    assert a == b

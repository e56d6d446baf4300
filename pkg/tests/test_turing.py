import pytest

from conftest import DATA
from horotile.address import Address
from horotile.cft import check, count_solutions, solve
from horotile.pattern import FormatError, Patch, Window
from horotile.turing import (
    DOT,
    EMPTY,
    Cell,
    MachineEnumerator,
    MachineStuck,
    MalformedDiagram,
    compile_to_rules,
    configurations,
    encode_diagram,
    extract_diagram,
    format_machine,
    lattice_rules,
    machine_ex,
    pad_word,
    parse_machine,
    run,
    tape_prefix,
)

MEX_HEAD = """\
   0    q0 [#] #  #  #  #
   1  qb++  a [#] #  #  #
   2    q|  a  b [#] #  #
   3   qa+  a [b] |  #  #
   4   qa+ [a] b  |  #  #
   5    q0  a [b] |  #  #
   6   qb+  a  a [|] #  #
   7  qb++  a  a  b [#] #
   8    q|  a  a  b  b [#]"""

MACHINES = ["mex.tm", "counter.tm", "halter.tm", "bounce.tm"]


def load(name):
    return parse_machine((DATA / name).read_text())


def test_mex_file_matches_builtin():
    assert load("mex.tm") == machine_ex()
    assert parse_machine(format_machine(machine_ex())) == machine_ex()


def test_mex_first_rows():
    assert run(machine_ex(), "", 8).text(5) == MEX_HEAD


def test_mex_phases():
    prefixes = []
    for tape, _, _, written in configurations(machine_ex()):
        if written == "|":
            prefixes.append(tape_prefix(tape, "#"))
            if len(prefixes) == 4:
                break
    assert prefixes == ["ab|", "aabb|", "aaabbb|", "aaaabbbb|"]


@pytest.mark.parametrize("name", MACHINES)
def test_consecutive_rows_differ_locally(name):
    tm = load(name)
    d = run(tm, "", 60)
    for prev, row in zip(d.rows, d.rows[1:]):
        t0, t1 = dict(prev.tape), dict(row.tape)
        changed = {o for o in set(t0) | set(t1) if t0.get(o, tm.blank) != t1.get(o, tm.blank)}
        assert changed <= {prev.head}
        assert abs(row.head - prev.head) <= 1


def test_halting_stops_the_run():
    d = run(load("halter.tm"), "", 50)
    assert len(d) == 3
    assert d.rows[-1].state == "h"


def test_stuck_machine():
    with pytest.raises(MachineStuck):
        run(load("stuck.tm"), "", 5)


def test_negative_steps():
    with pytest.raises(ValueError):
        run(machine_ex(), "", -1)


@pytest.mark.parametrize(
    "text",
    [
        "states: s\ninitial: t\nblank: #\ntape: #\n",
        "states: s\ninitial: s\nblank: #\ntape: #\ndelta: s # -> s # R\ndelta: s # -> s # L\n",
        "states: s\ninitial: s\nblank: #\ntape: #\ndelta: s # -> s x R\n",
        "states: s\ninitial: s\nblank: #\ntape: #\ndelta: s # s # R\n",
        "states: s\ninitial: s\nblank: #\ntape: #\ndelta: s # -> s # U\n",
        "bogus line\n",
    ],
)
def test_machine_format_errors(text):
    with pytest.raises(FormatError):
        parse_machine(text)


def test_lattice_rules():
    rules = lattice_rules()
    all_empty = Patch(rules.alphabet, {a: EMPTY for a in Window(0, 3, 0, 2).cells()})
    assert check(all_empty, rules) == []
    seed = Patch(rules.alphabet, {Address(0, 0): DOT, Address(0, 1): DOT})
    assert count_solutions(Window(0, 3, 0, 2), rules, seed=seed) == 1
    sol = solve(Window(0, 3, 0, 2), rules, seed=seed)
    dots = sorted(a for a, s in sol.cells.items() if s == DOT)
    # the dots form a grid: column j of level l sits at offset j * 2^l
    assert dots == sorted(Address(lv, j << lv) for lv in range(4) for j in range(2))


def test_cell_names_roundtrip():
    for name in compile_to_rules(machine_ex()).alphabet.symbols:
        assert Cell.parse(name).name == name


def test_mex_alphabet_size():
    assert len(compile_to_rules(machine_ex()).alphabet) == 146


@pytest.mark.parametrize("name", MACHINES)
def test_compiled_window_is_the_diagram(name):
    tm = load(name)
    cm = compile_to_rules(tm)
    width, depth = 8, 5
    window = cm.window(width, depth)
    seed = cm.seed_row(width)
    assert count_solutions(window, cm.rules, seed=seed, stop_at=2) == 1
    sol = solve(window, cm.rules, seed=seed)
    assert sol == encode_diagram(cm, width, depth)
    got = extract_diagram(sol, tm.blank, tm.halting)
    want = run(tm, "", depth)
    assert got.truncated(width) == want.truncated(width)


def test_corrupted_cell_is_flagged():
    cm = compile_to_rules(machine_ex())
    patch = encode_diagram(cm, 8, 5)
    a = Address(3, 0)
    c = Cell.parse(patch.cells[a])
    other = next(s for s in ("a", "b", "|", "#") if s != c.sym)
    bad = Cell(c.mark, other, c.head, c.rin, c.lin, c.edge)
    assert bad.name in cm.alphabet
    cells = dict(patch.cells)
    cells[a] = bad.name
    assert check(Patch(cm.alphabet, cells), cm.rules)


def test_extract_edge_cases():
    cm = compile_to_rules(machine_ex())
    empty = Cell(EMPTY).name
    assert len(extract_diagram(Patch(cm.alphabet, {Address(0, 0): empty}))) == 0
    two_heads = {
        Address(0, 0): Cell(DOT, "#", "q0").name,
        Address(0, 1): Cell(DOT, "#", "q0").name,
    }
    with pytest.raises(MalformedDiagram):
        extract_diagram(Patch(cm.alphabet, two_heads))


def test_seed_row_rejects_zero_width():
    with pytest.raises(ValueError):
        compile_to_rules(machine_ex()).seed_row(0)


def test_enumerator_words_and_padding():
    cm = compile_to_rules(machine_ex())
    enum = MachineEnumerator(machine_ex(), cm.alphabet, pad_word)
    assert enum.words(20) == ["ab", "aabb", "aaabbb"]
    pats = enum.take(20)
    assert [p.n for p in pats] == [2, 3, 3]
    assert pats[0].flat() == ("a", "b", "*")


def test_stuck_machine_has_no_completion():
    cm = compile_to_rules(load("stuck.tm"))
    assert count_solutions(cm.window(4, 3), cm.rules, seed=cm.seed_row(4)) == 0
    assert encode_diagram(cm, 4, 3) is None

"""Turing machines, their space-time diagrams, and their embedding into local rules.

The embedding lives on a Z x N grid of ``•`` cells inside the tessellation:
every ``•`` cell's left child is ``•`` and its right child ``∅``, so each
``•`` row keeps the same number of cells while the spacing doubles.  A head
move travels as a one-row signal through the ``∅`` cells lying between two
neighbouring ``•`` cells, and lands on the next row through the child relation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from .address import Address
from .cft import AllowedFamily, RuleSet
from .pattern import Alphabet, FormatError, Patch, Pattern, Window, _strip_comment

DOT = "•"
EMPTY = "∅"
NONE = "-"
MOVES = ("L", "R", "S")


class MachineStuck(RuntimeError):
    """No transition for the current (state, symbol) in a non-halting state."""


class MalformedDiagram(ValueError):
    pass


@dataclass(frozen=True)
class TuringMachine:
    states: tuple[str, ...]
    initial: str
    blank: str
    tape: tuple[str, ...]
    delta: dict
    halting: frozenset = frozenset()
    one_sided: bool = False

    def __post_init__(self):
        if self.initial not in self.states:
            raise ValueError(f"initial state {self.initial!r} not among states")
        if self.blank not in self.tape:
            raise ValueError("blank must be a tape symbol")
        for (q, s), (q2, s2, d) in self.delta.items():
            if q not in self.states or q2 not in self.states:
                raise ValueError(f"unknown state in transition {q} {s}")
            if s not in self.tape or s2 not in self.tape:
                raise ValueError(f"unknown tape symbol in transition {q} {s}")
            if d not in MOVES:
                raise ValueError(f"bad move {d!r}")
        for name in self.states + self.tape:
            if "," in name or not name or any(ch.isspace() for ch in name):
                raise ValueError(f"invalid name {name!r}")

    def __hash__(self):
        return hash((self.states, self.initial, self.blank, self.tape, tuple(sorted(self.delta.items()))))

    def step(self, state: str, symbol: str) -> tuple[str, str, str]:
        try:
            return self.delta[(state, symbol)]
        except KeyError:
            raise MachineStuck(f"no transition for ({state}, {symbol})") from None


def machine_ex() -> TuringMachine:
    """Five states over ``a b | #`` rewriting ``a^n b^n |`` into ``a^(n+1) b^(n+1) |`` forever.

    The tape passes through ``ab|``, ``aabb|``, ``aaabbb|``, ... at offset 0.
    """
    delta = {
        ("q0", "#"): ("qb++", "a", "R"),
        ("q0", "b"): ("qb+", "a", "R"),
        ("qb+", "b"): ("qb+", "b", "R"),
        ("qb+", "|"): ("qb++", "b", "R"),
        ("qb++", "#"): ("q|", "b", "R"),
        ("q|", "#"): ("qa+", "|", "L"),
        ("qa+", "b"): ("qa+", "b", "L"),
        ("qa+", "a"): ("q0", "a", "R"),
    }
    return TuringMachine(
        states=("q0", "qa+", "qb+", "qb++", "q|"),
        initial="q0",
        blank="#",
        tape=("a", "b", "|", "#"),
        delta=delta,
        one_sided=True,
    )


# ------------------------------------------------------------------ simulation


@dataclass(frozen=True)
class DiagramRow:
    tape: tuple[tuple[int, str], ...]  # written cells, sorted by offset
    head: int
    state: str

    def symbol(self, offset: int, blank: str) -> str:
        return dict(self.tape).get(offset, blank)

    def window(self, lo: int, hi: int, blank: str) -> tuple[str, ...]:
        t = dict(self.tape)
        return tuple(t.get(i, blank) for i in range(lo, hi))

    def cells(self, blank: str) -> dict[int, tuple[str, Optional[str]]]:
        out = {o: (s, None) for o, s in self.tape}
        sym = out.get(self.head, (blank, None))[0]
        out[self.head] = (sym, self.state)
        return out


@dataclass
class SpaceTimeDiagram:
    rows: list
    blank: str = "#"

    def __len__(self) -> int:
        return len(self.rows)

    def truncated(self, width: int) -> list[tuple[tuple[str, ...], Optional[int], Optional[str]]]:
        out = []
        for row in self.rows:
            inside = 0 <= row.head < width
            out.append((row.window(0, width, self.blank), row.head if inside else None, row.state if inside else None))
        return out

    def text(self, width: Optional[int] = None) -> str:
        lines = []
        hi = width
        if hi is None:
            hi = max([o + 1 for r in self.rows for o, _ in r.tape] + [r.head + 1 for r in self.rows] + [1])
        lo = min([o for r in self.rows for o, _ in r.tape] + [r.head for r in self.rows] + [0])
        for t, row in enumerate(self.rows):
            cells = []
            for o in range(lo, hi):
                s = row.symbol(o, self.blank)
                cells.append(f"[{s}]" if o == row.head else f" {s} ")
            lines.append(f"{t:4d} {row.state:>5s} " + "".join(cells).rstrip())
        return "\n".join(lines)


def configurations(tm: TuringMachine, input: str = "") -> Iterator[tuple[dict[int, str], int, str, Optional[str]]]:
    """Endless stream of ``(tape, head, state, written)`` after each step; the tape dict is shared and mutated.

    The first item is the initial configuration with ``written=None``.  The
    stream ends after a halting state is entered.
    """
    tape = {i: s for i, s in enumerate(input)}
    head, state = 0, tm.initial
    yield tape, head, state, None
    while state not in tm.halting:
        q2, s2, d = tm.step(state, tape.get(head, tm.blank))
        tape[head] = s2
        if d == "R":
            head += 1
        elif d == "L" and not (tm.one_sided and head == 0):
            head -= 1
        state = q2
        yield tape, head, state, s2


def run(tm: TuringMachine, input: str = "", steps: int = 0) -> SpaceTimeDiagram:
    """Rows ``0..steps`` of the computation from ``tm.initial`` on ``input``; stops early on halting."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    rows = []
    for tape, head, state, _ in itertools.islice(configurations(tm, input), steps + 1):
        rows.append(DiagramRow(tuple(sorted(tape.items())), head, state))
    return SpaceTimeDiagram(rows, tm.blank)


def tape_symbols(tape: dict[int, str], blank: str) -> list[str]:
    """Contents from offset 0 up to the first blank."""
    out = []
    i = 0
    while tape.get(i, blank) != blank:
        out.append(tape[i])
        i += 1
    return out


def tape_prefix(tape: dict[int, str], blank: str) -> str:
    return "".join(tape_symbols(tape, blank))


# ------------------------------------------------------------------ machine files


def parse_machine(text: str) -> TuringMachine:
    fields: dict[str, str] = {}
    delta = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        key, _, value = line.partition(":")
        key = key.strip()
        if key == "delta":
            lhs, arrow, rhs = value.partition("->")
            if not arrow:
                raise FormatError(lineno, "delta needs '->'")
            left, right = lhs.split(), rhs.split()
            if len(left) != 2 or len(right) != 3:
                raise FormatError(lineno, "delta: <state> <read> -> <state> <write> <L|R|S>")
            if tuple(left) in delta:
                raise FormatError(lineno, f"nondeterministic: second transition for {left}")
            delta[tuple(left)] = tuple(right)
        elif key in ("states", "initial", "blank", "halting", "tape", "one_sided"):
            fields[key] = value.strip()
        else:
            raise FormatError(lineno, f"unknown key {key!r}")
    for required in ("states", "initial", "blank", "tape"):
        if required not in fields:
            raise FormatError(0, f"missing {required!r} line")
    tape = tuple(fields["tape"].split())
    blank = fields["blank"]
    if blank not in tape:
        tape = tape + (blank,)
    try:
        return TuringMachine(
            states=tuple(fields["states"].split()),
            initial=fields["initial"],
            blank=blank,
            tape=tape,
            delta=delta,
            halting=frozenset(fields.get("halting", "").split()),
            one_sided=fields.get("one_sided", "no").lower() in ("yes", "true", "1"),
        )
    except ValueError as exc:
        raise FormatError(0, str(exc)) from None


def format_machine(tm: TuringMachine) -> str:
    lines = [
        "states: " + " ".join(tm.states),
        f"initial: {tm.initial}",
        f"blank: {tm.blank}",
    ]
    if tm.halting:
        lines.append("halting: " + " ".join(sorted(tm.halting)))
    lines.append("tape: " + " ".join(tm.tape))
    if tm.one_sided:
        lines.append("one_sided: yes")
    for (q, s), (q2, s2, d) in tm.delta.items():
        lines.append(f"delta: {q} {s} -> {q2} {s2} {d}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ lattice


def lattice_rules() -> RuleSet:
    """Z x N inside the tessellation: a ``•`` has a ``•`` left child and an ``∅`` right child; ``∅`` has ``∅`` children."""
    fam = AllowedFamily(2, 1, frozenset({(DOT, DOT, EMPTY), (EMPTY, EMPTY, EMPTY)}), name="lattice")
    return RuleSet(Alphabet((DOT, EMPTY)), [], [fam])


# ------------------------------------------------------------------ compilation


@dataclass(frozen=True)
class Cell:
    """Decoded compiled symbol.  ``•`` cells carry tape data, ``∅`` cells carry wires."""

    mark: str
    sym: str = NONE
    head: str = NONE
    rin: str = NONE  # signal arriving from the left neighbour
    lin: str = NONE  # signal arriving from the right neighbour
    edge: str = NONE  # "L", "R", "LR" on the grid's boundary columns

    @property
    def name(self) -> str:
        if self.mark == EMPTY:
            return f"{EMPTY},{self.rin},{self.lin}"
        return f"{DOT},{self.sym},{self.head},{self.rin},{self.lin},{self.edge}"

    @classmethod
    def parse(cls, name: str) -> "Cell":
        parts = name.split(",")
        if parts[0] == EMPTY:
            return cls(EMPTY, rin=parts[1], lin=parts[2])
        return cls(DOT, *parts[1:])


@dataclass
class CompiledMachine:
    machine: TuringMachine
    alphabet: Alphabet
    rules: RuleSet

    def seed_row(self, width: int, level: int = 0, offset: int = 0) -> Patch:
        """A ``•`` row of blank cells with the initial state once, at its left end."""
        if width < 1:
            raise ValueError("width must be >= 1")
        tm = self.machine
        cells = []
        for j in range(width):
            edge = ("L" if j == 0 else "") + ("R" if j == width - 1 else "")
            cells.append(Cell(DOT, tm.blank, tm.initial if j == 0 else NONE, edge=edge or NONE))
        rout, lout = _outputs(tm, cells[0])
        if rout != NONE and width > 1:
            c = cells[1]
            cells[1] = Cell(DOT, c.sym, c.head, rout, c.lin, c.edge)
        return Patch(self.alphabet, {Address(level, offset + j): c.name for j, c in enumerate(cells)})

    def window(self, width: int, depth: int, level: int = 0, offset: int = 0) -> Window:
        return Window(level, level + depth, offset, offset + width)


def _effective_move(tm: TuringMachine, cell: Cell, move: str) -> str:
    if move == "L" and tm.one_sided and "L" in cell.edge:
        return "S"
    return move


def _outputs(tm: TuringMachine, cell: Cell) -> tuple[str, str]:
    """Signals a ``•`` cell emits to the right and to the left."""
    if cell.mark != DOT or cell.head == NONE or cell.head in tm.halting:
        return NONE, NONE
    t = tm.delta.get((cell.head, cell.sym))
    if t is None:
        return NONE, NONE
    q2, _, d = t
    d = _effective_move(tm, cell, d)
    if d == "R":
        return q2, NONE
    if d == "L":
        return NONE, q2
    return NONE, NONE


def _child(tm: TuringMachine, cell: Cell) -> Optional[tuple[str, str]]:
    """(symbol, head) of the ``•`` child of a ``•`` cell; ``None`` when the machine is stuck."""
    if cell.head == NONE:
        arriving = cell.rin if cell.rin != NONE else cell.lin
        return cell.sym, arriving
    if cell.head in tm.halting:
        return cell.sym, cell.head
    t = tm.delta.get((cell.head, cell.sym))
    if t is None:
        return None
    q2, s2, d = t
    d = _effective_move(tm, cell, d)
    return s2, (q2 if d == "S" else NONE)


def compile_to_rules(tm: TuringMachine) -> CompiledMachine:
    """Local rules whose seeded windows are exactly the machine's space-time diagram on the ``•`` grid."""
    r_targets = sorted({q2 for (q2, _, d) in tm.delta.values() if d == "R"})
    l_targets = sorted({q2 for (q2, _, d) in tm.delta.values() if d == "L"})
    if tm.one_sided:
        l_targets = sorted(set(l_targets))
    rins = [NONE] + r_targets
    lins = [NONE] + l_targets
    heads = [NONE] + list(tm.states)
    dots = []
    for sym, head, rin, lin, edge in itertools.product(tm.tape, heads, rins, lins, (NONE, "L", "R", "LR")):
        if rin != NONE and lin != NONE:
            continue
        if head != NONE and (rin != NONE or lin != NONE):
            continue
        if "L" in edge and rin != NONE:
            continue
        if "R" in edge and lin != NONE:
            continue
        dots.append(Cell(DOT, sym, head, rin, lin, edge))
    empties = [Cell(EMPTY, rin=r, lin=l) for r in rins for l in lins]
    cells = empties + dots
    alphabet = Alphabet(tuple(c.name for c in cells))

    horizontal = set()
    edges = {}
    for c in cells:
        if c.mark == EMPTY:
            edges[c] = (c.rin, c.rin, c.lin, c.lin)  # r_left, r_right, l_left, l_right
        else:
            rout, lout = _outputs(tm, c)
            edges[c] = (c.rin, rout, lout, c.lin)
    by_left: dict[tuple[str, str], list[Cell]] = {}
    for c in cells:
        r_left, _, l_left, _ = edges[c]
        by_left.setdefault((r_left, l_left), []).append(c)
    for x in cells:
        _, r_right, _, l_right = edges[x]
        for y in by_left.get((r_right, l_right), []):
            horizontal.add((x.name, y.name))

    vertical = set()
    dots_by_key: dict[tuple[str, str, str], list[Cell]] = {}
    for c in dots:
        dots_by_key.setdefault((c.sym, c.head, c.edge), []).append(c)
    empty_names = [c.name for c in empties]
    for e in empties:
        for c0, c1 in itertools.product(empty_names, repeat=2):
            vertical.add((e.name, c0, c1))
    for p in dots:
        child = _child(tm, p)
        if child is None:
            continue
        sym, head = child
        for c0 in dots_by_key.get((sym, head, p.edge), []):
            for c1 in empty_names:
                vertical.add((p.name, c0.name, c1))

    rules = RuleSet(
        alphabet,
        [],
        [
            AllowedFamily(2, 1, frozenset(vertical), name="vertical"),
            AllowedFamily(1, 2, frozenset(horizontal), name="horizontal"),
        ],
    )
    return CompiledMachine(tm, alphabet, rules)


def extract_diagram(patch: Patch, blank: str = "#", halting: frozenset = frozenset()) -> SpaceTimeDiagram:
    """Read the computation off the ``•`` cells, one diagram row per level; stops after a halting row."""
    by_level: dict[int, list[tuple[int, Cell]]] = {}
    for a, name in patch.cells.items():
        c = Cell.parse(name)
        if c.mark == DOT:
            by_level.setdefault(a.level, []).append((a.offset, c))
    rows = []
    for level in sorted(by_level):
        dots = sorted(by_level[level], key=lambda t: t[0])
        heads = [(j, c.head) for j, (_, c) in enumerate(dots) if c.head != NONE]
        if len(heads) != 1:
            raise MalformedDiagram(f"row at level {level} has {len(heads)} heads")
        tape = tuple((j, c.sym) for j, (_, c) in enumerate(dots))
        head, state = heads[0]
        rows.append(DiagramRow(tape, head, state))
        if state in halting:
            break
    return SpaceTimeDiagram(rows, blank)


def encode_diagram(cm: CompiledMachine, width: int, depth: int) -> Optional[Patch]:
    """Direct construction of the seeded window (no search); ``None`` if the head leaves or the machine sticks."""
    tm = cm.machine
    window = cm.window(width, depth)
    seed = cm.seed_row(width)
    cells: dict[Address, str] = dict(seed.cells)
    for level in window.levels():
        if level == window.top:
            continue
        row = window.row_range(level)
        new: dict[int, Cell] = {}
        for o in row:
            parent = Cell.parse(cells[Address(level - 1, o >> 1)])
            if parent.mark == DOT and o % 2 == 0:
                child = _child(tm, parent)
                if child is None:
                    return None
                new[o] = Cell(DOT, child[0], child[1], edge=parent.edge)
        # wire signals: rightward from the left, leftward from the right
        r = NONE
        for o in row:
            if o in new:
                c = new[o]
                new[o] = Cell(DOT, c.sym, c.head, r if "L" not in c.edge else NONE, c.lin, c.edge)
                r = _outputs(tm, new[o])[0]
            else:
                new[o] = Cell(EMPTY, rin=r)
        lsig = NONE
        for o in reversed(row):
            c = new[o]
            if c.mark == DOT:
                c = Cell(DOT, c.sym, c.head, c.rin, lsig if "R" not in c.edge else NONE, c.edge)
                new[o] = c
                lsig = _outputs(tm, c)[1]
            else:
                new[o] = Cell(EMPTY, rin=c.rin, lin=lsig)
        for o, c in new.items():
            if c.name not in cm.alphabet:
                return None
            cells[Address(level, o)] = c.name
    return Patch(cm.alphabet, cells)


# ------------------------------------------------------------------ enumerators


@dataclass
class MachineEnumerator:
    """Patterns printed by a machine: each word ending in ``separator`` is decoded into a pattern.

    The budget counts machine steps.  Words are collected from the tape
    prefix, so an in-place enumerator like :func:`machine_ex` yields one word
    per phase.
    """

    machine: TuringMachine
    alphabet: Alphabet
    decode: Callable[[str], Optional[Pattern]]
    separator: str = "|"

    def words(self, budget: int) -> list[str]:
        tm = self.machine
        seen: list[str] = []
        for tape, _, _, written in itertools.islice(configurations(tm), budget + 1):
            if written != self.separator:
                continue
            for word in tape_prefix(tape, tm.blank).split(self.separator)[:-1]:
                if word and word not in seen:
                    seen.append(word)
        return seen

    def take(self, budget: int) -> list[Pattern]:
        out = []
        for w in self.words(budget):
            p = self.decode(w)
            if p is not None:
                out.append(p)
        return out

    def __iter__(self) -> Iterator[Pattern]:
        return iter(self.take(10_000))


def pad_word(word: str) -> Pattern:
    """The smallest U_n pattern whose reading order starts with ``word``; the rest is wildcard."""
    n = 1
    while (1 << n) - 1 < len(word):
        n += 1
    flat = list(word) + ["*"] * ((1 << n) - 1 - len(word))
    return Pattern.from_flat(flat, n)

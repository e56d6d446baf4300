"""Sets of colourings given by local rules, and a bounded backtracking solver.

A :class:`RuleSet` holds forbidden patterns (on U_n, or on blocks of adjacent
U_n's) and, optionally, families of *allowed* patterns: every occurrence of a
family's support must carry one of the listed colourings.  An allowed family is
the complement of a finite forbidden list and is what local-rule compilers emit.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Optional, Protocol, Sequence

from .address import Address
from .pattern import (
    WILDCARD,
    Alphabet,
    FormatError,
    Patch,
    Pattern,
    Window,
    _strip_comment,
    format_alphabet,
    format_cells,
    match_at,
    parse_alphabet_line,
)

DEFAULT_NODE_LIMIT = int(os.environ.get("HOROTILE_NODE_LIMIT", "2000000"))


class BudgetExceeded(RuntimeError):
    """The solver visited more nodes than allowed; the instance is undecided."""


@dataclass(frozen=True)
class AllowedFamily:
    n: int
    width: int
    patterns: frozenset
    name: str = ""

    def shape(self) -> Pattern:
        return Pattern.from_flat([""] * self.size, self.n, self.width)

    @property
    def size(self) -> int:
        return self.width * ((1 << self.n) - 1)

    @cached_property
    def trie(self) -> dict[tuple, frozenset]:
        """Prefix of a colouring (in support order) -> symbols allowed next."""
        nxt: dict[tuple, set] = {}
        for t in self.patterns:
            for j in range(len(t)):
                nxt.setdefault(t[:j], set()).add(t[j])
        return {k: frozenset(v) for k, v in nxt.items()}


@dataclass
class RuleSet:
    alphabet: Alphabet
    forbidden: list = field(default_factory=list)
    allowed: list = field(default_factory=list)

    @property
    def max_n(self) -> int:
        sizes = [p.n for p in self.forbidden] + [f.n for f in self.allowed]
        return max(sizes, default=0)

    def __len__(self) -> int:
        return len(self.forbidden) + len(self.allowed)

    def extended(self, patterns: Iterable[Pattern]) -> "RuleSet":
        return RuleSet(self.alphabet, list(self.forbidden) + list(patterns), list(self.allowed))


@dataclass(frozen=True)
class RowConstraint:
    halfplane_symbol: str
    boundary_level: int


class Enumerator(Protocol):
    alphabet: Alphabet

    def take(self, budget: int) -> list[Pattern]:
        ...

    def __iter__(self) -> Iterator[Pattern]:
        ...


@dataclass
class ListEnumerator:
    alphabet: Alphabet
    patterns: list

    def __iter__(self) -> Iterator[Pattern]:
        return iter(list(self.patterns))

    def take(self, budget: int) -> list[Pattern]:
        return list(self.patterns[:max(budget, 0)])


def limit_enumerator(e: Enumerator, budget: int) -> RuleSet:
    """The finite rule set produced by ``e`` within ``budget`` (patterns, or machine steps)."""
    if budget < 0:
        raise ValueError("budget must be >= 0")
    return RuleSet(e.alphabet, e.take(budget))


# ------------------------------------------------------------------ checking


def check(patch: Patch, rules: RuleSet) -> list[tuple[int, Address]]:
    """Occurrences ``(rule index, base)`` of forbidden patterns, then of disallowed family colourings."""
    if patch.alphabet.symbols != rules.alphabet.symbols:
        raise ValueError("patch and rule set use different alphabets")
    out = []
    bases = sorted(patch.cells)
    for i, p in enumerate(rules.forbidden):
        out.extend((i, g) for g in bases if match_at(patch, p, g))
    cells = patch.cells
    for k, fam in enumerate(rules.allowed, start=len(rules.forbidden)):
        shape = fam.shape()
        for g in bases:
            values = []
            for a in shape.support(g):
                v = cells.get(a)
                if v is None:
                    break
                values.append(v)
            else:
                if tuple(values) not in fam.patterns:
                    out.append((k, g))
    return out


def enforce_half_plane(patch: Patch, rc: RowConstraint) -> list[Address]:
    """Cells breaking the half-plane closure of ``rc.halfplane_symbol``."""
    hp = rc.halfplane_symbol
    bad = set()
    non_hp_levels = [a.level for a, s in patch.cells.items() if s != hp]
    lowest_non = min(non_hp_levels, default=None)
    for a, s in patch.cells.items():
        if a.level <= rc.boundary_level:
            if s != hp:
                bad.add(a)
        elif s == hp and lowest_non is not None and lowest_non <= a.level:
            bad.add(a)
    return sorted(bad)


# ------------------------------------------------------------------ solving


class _Plan:
    """Precomputed occurrence tables for a window, in solver cell order."""

    def __init__(self, window: Window, rules: RuleSet):
        self.cells = window.cells()
        self.index = {a: i for i, a in enumerate(self.cells)}
        self.symbols = rules.alphabet.symbols
        self.order = {s: i for i, s in enumerate(self.symbols)}
        n = len(self.cells)
        # allowed families: for each cell, (trie, prefix cell indices)
        self.allowed: list[list[tuple[dict, tuple[int, ...]]]] = [[] for _ in range(n)]
        # forbidden patterns: checks run when the occurrence's last cell is set
        self.forbidden: list[list[tuple[tuple[int, ...], tuple[str, ...]]]] = [[] for _ in range(n)]
        for fam in rules.allowed:
            shape = fam.shape()
            trie = fam.trie
            for idx in self._occurrences(window, shape):
                for pos, ci in enumerate(idx):
                    self.allowed[ci].append((trie, idx[:pos]))
        for p in rules.forbidden:
            flat = p.flat()
            for idx in self._occurrences(window, p):
                keep = tuple(i for i, s in zip(idx, flat) if s != WILDCARD)
                syms = tuple(s for s in flat if s != WILDCARD)
                if keep:
                    self.forbidden[max(keep)].append((keep, syms))

    def _occurrences(self, window: Window, shape: Pattern) -> Iterator[tuple[int, ...]]:
        if shape.n == 0:
            return
        for level in range(window.top, window.bottom - shape.n + 2):
            row = window.row_range(level)
            for m in range(row.start, row.stop - shape.width + 1):
                yield tuple(self.index[a] for a in shape.support(Address(level, m)))


def iter_solutions(
    window: Window,
    rules: RuleSet,
    rc: Optional[RowConstraint] = None,
    seed: Optional[Patch] = None,
    node_limit: Optional[int] = None,
    rng: Optional[random.Random] = None,
) -> Iterator[Patch]:
    """All colourings of ``window`` satisfying ``rules`` (and ``rc``), in DFS order.

    Cells are filled in (level, offset) order and symbols tried in alphabet
    order, or in a random order drawn from ``rng``.  Raises
    :class:`BudgetExceeded` after ``node_limit`` assignments.
    """
    limit = DEFAULT_NODE_LIMIT if node_limit is None else node_limit
    plan = _Plan(window, rules)
    cells = plan.cells
    n = len(cells)
    fixed: dict[int, str] = {}
    if seed is not None:
        for a, s in seed.cells.items():
            if a not in plan.index:
                raise ValueError(f"seed cell {a} lies outside the window")
            if s not in rules.alphabet:
                raise ValueError(f"seed symbol {s!r} not in alphabet")
            fixed[plan.index[a]] = s
    hp = rc.halfplane_symbol if rc else None
    values: list[Optional[str]] = [None] * n
    all_syms = frozenset(plan.symbols)
    # half-plane bookkeeping: level of lowest non-hp cell so far, levels holding hp below boundary
    state_stack: list[tuple[Optional[int], Optional[int]]] = []
    lowest_non: Optional[int] = None
    highest_hp_below: Optional[int] = None

    def candidates(ci: int) -> list[str]:
        allowed = all_syms
        for trie, prefix in plan.allowed[ci]:
            nxt = trie.get(tuple(values[i] for i in prefix))
            if nxt is None:
                return []
            allowed = allowed & nxt
            if not allowed:
                return []
        if ci in fixed:
            allowed = allowed & {fixed[ci]}
        level = cells[ci].level
        if hp is not None:
            if level <= rc.boundary_level:
                allowed = allowed & {hp}
            else:
                if lowest_non is not None and hp in allowed:
                    allowed = allowed - {hp}
                if highest_hp_below is not None and highest_hp_below >= level:
                    allowed = allowed & {hp}
        out = []
        for s in sorted(allowed, key=plan.order.__getitem__):
            values[ci] = s
            ok = True
            for keep, syms in plan.forbidden[ci]:
                if all(values[i] == v for i, v in zip(keep, syms)):
                    ok = False
                    break
            if ok:
                out.append(s)
        values[ci] = None
        if rng is not None:
            rng.shuffle(out)
        return out

    nodes = 0
    stack: list[Iterator[str]] = []
    ci = 0
    if n == 0:
        yield Patch(rules.alphabet, {})
        return
    stack.append(iter(candidates(0)))
    state_stack.append((lowest_non, highest_hp_below))
    while stack:
        it = stack[-1]
        lowest_non, highest_hp_below = state_stack[-1]
        s = next(it, None)
        if s is None:
            stack.pop()
            state_stack.pop()
            ci -= 1
            if ci >= 0:
                values[ci] = None
            continue
        nodes += 1
        if nodes > limit:
            raise BudgetExceeded(f"node limit {limit} exceeded")
        values[ci] = s
        level = cells[ci].level
        new_lowest, new_hp = lowest_non, highest_hp_below
        if hp is not None and level > rc.boundary_level:
            if s == hp:
                new_hp = level
            elif new_lowest is None:
                new_lowest = level
        if ci == n - 1:
            yield Patch(rules.alphabet, dict(zip(cells, values)))
            values[ci] = None
            continue
        ci += 1
        lowest_non, highest_hp_below = new_lowest, new_hp
        stack.append(iter(candidates(ci)))
        state_stack.append((new_lowest, new_hp))
    return


def solve(
    window: Window,
    rules: RuleSet,
    rc: Optional[RowConstraint] = None,
    seed: Optional[Patch] = None,
    node_limit: Optional[int] = None,
    rng: Optional[random.Random] = None,
) -> Optional[Patch]:
    """First colouring in DFS order, or ``None`` when the window is unsatisfiable."""
    return next(iter_solutions(window, rules, rc, seed, node_limit, rng), None)


def count_solutions(window, rules, rc=None, seed=None, node_limit=None, stop_at=None) -> int:
    count = 0
    for _ in iter_solutions(window, rules, rc, seed, node_limit):
        count += 1
        if stop_at is not None and count >= stop_at:
            break
    return count


# ------------------------------------------------------------------ text format


def parse_rules(text: str) -> RuleSet:
    """Rule file: an alphabet header then ``forbidden { ... }`` / ``allowed <n> <width> { ... }`` blocks.

    Forbidden blocks hold ``cell:`` lines describing one U_n pattern (any base);
    allowed blocks hold ``pattern: s1 s2 ...`` lines flattened row by row; the
    optional name after ``<width>`` is a label without spaces.
    """
    symbols = None
    halfplane = blank = None
    forbidden, allowed = [], []
    block = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        head = line.split()
        if block is None:
            if head[0] in ("forbidden", "allowed") and head[-1] == "{" and symbols is None:
                raise FormatError(lineno, "block before alphabet")
            if head[0] == "forbidden" and head[-1] == "{":
                block = ("forbidden", lineno, {})
                continue
            if head[0] == "allowed" and head[-1] == "{":
                if len(head) not in (4, 5):
                    raise FormatError(lineno, "allowed block needs <n> <width> [name]")
                try:
                    n, w = int(head[1]), int(head[2])
                except ValueError:
                    raise FormatError(lineno, "allowed block needs integer <n> <width>") from None
                block = ("allowed", lineno, (n, w, set(), head[3] if len(head) == 5 else ""))
                continue
            key, _, value = line.partition(":")
            key = key.strip()
            if key == "alphabet":
                symbols = parse_alphabet_line(value, lineno)
            elif key == "halfplane":
                halfplane = value.strip()
            elif key == "blank":
                blank = value.strip()
            else:
                raise FormatError(lineno, f"unexpected line {line!r}")
            continue
        if line == "}":
            kind, start, data = block
            if kind == "forbidden":
                alphabet = Alphabet(symbols)
                try:
                    p, _ = Pattern.from_patch(Patch(alphabet, data, partial=True))
                except ValueError as exc:
                    raise FormatError(start, str(exc)) from None
                forbidden.append(p)
            else:
                n, w, pats, name = data
                allowed.append(AllowedFamily(n, w, frozenset(pats), name))
            block = None
            continue
        kind, start, data = block
        key, _, value = line.partition(":")
        parts = value.split()
        if kind == "forbidden":
            if key.strip() != "cell" or len(parts) != 3:
                raise FormatError(lineno, "expected cell: <level> <offset> <symbol>")
            try:
                a = Address(int(parts[0]), int(parts[1]))
            except ValueError:
                raise FormatError(lineno, "non-integer coordinate") from None
            if a in data:
                raise FormatError(lineno, f"duplicate cell {a}")
            if parts[2] not in symbols and parts[2] != WILDCARD:
                raise FormatError(lineno, f"unknown symbol {parts[2]!r}")
            data[a] = parts[2]
        else:
            n, w, pats, _ = data
            if key.strip() != "pattern" or len(parts) != w * ((1 << n) - 1):
                raise FormatError(lineno, "bad pattern line")
            unknown = [s for s in parts if s not in symbols]
            if unknown:
                raise FormatError(lineno, f"unknown symbol {unknown[0]!r}")
            pats.add(tuple(parts))
    if block is not None:
        raise FormatError(block[1], "unterminated block")
    if symbols is None:
        raise FormatError(0, "missing alphabet line")
    return RuleSet(Alphabet(symbols, blank=blank, halfplane=halfplane), forbidden, allowed)


def serialize_rules(rules: RuleSet) -> str:
    lines = format_alphabet(rules.alphabet)
    for p in rules.forbidden:
        lines.append("forbidden {")
        lines.extend(format_cells(dict(zip(p.support(Address(0, 0)), p.flat()))))
        lines.append("}")
    for fam in rules.allowed:
        name = f" {fam.name}" if fam.name else ""
        lines.append(f"allowed {fam.n} {fam.width}{name} {{")
        lines.extend("pattern: " + " ".join(t) for t in sorted(fam.patterns))
        lines.append("}")
    return "\n".join(lines) + "\n"

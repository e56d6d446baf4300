"""Finite colourings: patches, U_n patterns, linear row patterns and windows.

Symbols are plain strings.  ``*`` is the wildcard (matches anything) and ``?``
the undetermined value produced by the dyadic encoding; both are reserved and
never alphabet members.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .address import Address

WILDCARD = "*"
UNDETERMINED = "?"
RESERVED = (WILDCARD, UNDETERMINED)


class FormatError(ValueError):
    """Malformed text input; carries the offending line number."""

    def __init__(self, lineno: int, reason: str):
        super().__init__(f"line {lineno}: {reason}")
        self.lineno = lineno
        self.reason = reason


class MissingCellsError(KeyError):
    def __init__(self, missing: Sequence[Address]):
        super().__init__(f"missing cells: {', '.join(map(str, missing))}")
        self.missing = list(missing)


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]
    blank: Optional[str] = None
    halfplane: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if not self.symbols:
            raise ValueError("alphabet must be non-empty")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("alphabet symbols must be unique")
        for s in self.symbols:
            if s in RESERVED or not s or any(ch.isspace() for ch in s):
                raise ValueError(f"invalid symbol name {s!r}")
        for special in (self.blank, self.halfplane):
            if special is not None and special not in self.symbols:
                raise ValueError(f"designated symbol {special!r} not in alphabet")

    def __contains__(self, s: object) -> bool:
        return s in self.symbols

    def __iter__(self) -> Iterator[str]:
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def index(self, s: str) -> int:
        return self.symbols.index(s)


@dataclass
class Patch:
    """A finite partial colouring ``Address -> symbol``."""

    alphabet: Alphabet
    cells: dict = field(default_factory=dict)
    partial: bool = False

    def __post_init__(self):
        self.cells = {Address(*a): s for a, s in self.cells.items()}
        for a, s in self.cells.items():
            if s == WILDCARD:
                if not self.partial:
                    raise ValueError(f"wildcard at {a} in a non-partial patch")
            elif s != UNDETERMINED and s not in self.alphabet:
                raise ValueError(f"unknown symbol {s!r} at {a}")

    def __len__(self) -> int:
        return len(self.cells)

    def __getitem__(self, a: Address) -> str:
        return self.cells[a]

    def get(self, a: Address, default=None):
        return self.cells.get(a, default)

    def __contains__(self, a: object) -> bool:
        return a in self.cells

    def addresses(self) -> list[Address]:
        return sorted(self.cells)

    def levels(self) -> list[int]:
        return sorted({a.level for a in self.cells})

    def row(self, level: int) -> dict[int, str]:
        return {a.offset: s for a, s in self.cells.items() if a.level == level}

    def shifted(self, d: int) -> "Patch":
        """Translate every cell horizontally by ``d`` on its own row."""
        return Patch(self.alphabet, {Address(a.level, a.offset + d): s for a, s in self.cells.items()}, self.partial)

    def restrict(self, addresses: Iterable[Address]) -> "Patch":
        return Patch(self.alphabet, {a: self.cells[a] for a in addresses if a in self.cells}, self.partial)


@dataclass(frozen=True)
class Pattern:
    """A colouring of the block ``U_n ∪ b U_n ∪ ... ∪ b^(width-1) U_n``.

    Row ``r`` holds ``width * 2**r`` symbols; width 1 is the plain support U_n.
    """

    rows: tuple[tuple[str, ...], ...]
    width: int = 1

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        for r, row in enumerate(rows):
            if len(row) != self.width << r:
                raise ValueError(f"row {r} has {len(row)} cells, expected {self.width << r}")

    @property
    def n(self) -> int:
        return len(self.rows)

    @classmethod
    def from_flat(cls, symbols: Sequence[str], n: int, width: int = 1) -> "Pattern":
        rows, i = [], 0
        for r in range(n):
            k = width << r
            rows.append(tuple(symbols[i:i + k]))
            i += k
        if i != len(symbols):
            raise ValueError(f"expected {i} symbols, got {len(symbols)}")
        return cls(tuple(rows), width)

    def flat(self) -> tuple[str, ...]:
        return tuple(s for row in self.rows for s in row)

    def relative_cells(self) -> Iterator[tuple[int, int, str]]:
        for r, row in enumerate(self.rows):
            for j, s in enumerate(row):
                yield r, j, s

    def support(self, base: Address) -> list[Address]:
        level, m = base
        return [Address(level + r, (m << r) + j) for r, row in enumerate(self.rows) for j in range(len(row))]

    def to_patch(self, alphabet: Alphabet, base: Address = Address(0, 0)) -> Patch:
        cells = dict(zip(self.support(base), self.flat()))
        return Patch(alphabet, cells, partial=WILDCARD in self.flat())

    @classmethod
    def from_patch(cls, patch: Patch) -> tuple["Pattern", Address]:
        """Recover a U_n pattern and its base from a patch whose cells are exactly ``g.U_n``."""
        if not patch.cells:
            return cls(()), Address(0, 0)
        base = min(patch.cells)
        rows = []
        level, m = base
        r = 0
        while len(patch.cells) > sum(1 << i for i in range(r)):
            row = []
            for j in range(1 << r):
                a = Address(level + r, (m << r) + j)
                if a not in patch.cells:
                    raise ValueError(f"patch is not a U_n pattern: missing {a}")
                row.append(patch.cells[a])
            rows.append(tuple(row))
            r += 1
        if len(patch.cells) != (1 << r) - 1:
            raise ValueError("patch is not a U_n pattern")
        return cls(tuple(rows)), base

    @property
    def partial(self) -> bool:
        return WILDCARD in self.flat()


@dataclass(frozen=True)
class LinearPattern:
    level: int
    start_offset: int
    symbols: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if not self.symbols:
            raise ValueError("linear pattern must have length >= 1")

    def __len__(self) -> int:
        return len(self.symbols)

    def determined(self) -> list[tuple[int, str]]:
        return [(i, s) for i, s in enumerate(self.symbols) if s != WILDCARD]

    def matches_at(self, row: Mapping[int, str], start: int, require_support: bool = True) -> bool:
        """Does the pattern match ``row`` (offset -> symbol) placed at ``start``?"""
        if require_support and any(start + i not in row for i in range(len(self.symbols))):
            return False
        for i, s in self.determined():
            if row.get(start + i) != s:
                return False
        return True


@dataclass(frozen=True)
class Window:
    """Trapezoid under ``[left, right)`` at ``top``; row ``l`` spans ``[left*2^(l-top), right*2^(l-top))``."""

    top: int
    bottom: int
    left: int
    right: int

    def __post_init__(self):
        if self.top > self.bottom:
            raise ValueError("top must be <= bottom")
        if self.left >= self.right:
            raise ValueError("left must be < right")

    @classmethod
    def parse(cls, spec: str) -> "Window":
        top, bottom, left, right = (int(x) for x in spec.split(":"))
        return cls(top, bottom, left, right)

    def __str__(self) -> str:
        return f"{self.top}:{self.bottom}:{self.left}:{self.right}"

    def row_range(self, level: int) -> range:
        k = level - self.top
        return range(self.left << k, self.right << k)

    def levels(self) -> range:
        return range(self.top, self.bottom + 1)

    def cells(self) -> list[Address]:
        return [Address(lv, o) for lv in self.levels() for o in self.row_range(lv)]

    def __contains__(self, a: object) -> bool:
        level, off = a  # type: ignore[misc]
        return self.top <= level <= self.bottom and off in self.row_range(level)

    def __len__(self) -> int:
        return sum(len(self.row_range(lv)) for lv in self.levels())


def extract(patch: Patch, base: Address, n: int) -> Pattern:
    """Restriction of ``patch`` to ``base.U_n`` as a pattern."""
    shape = Pattern(tuple(("",) * (1 << r) for r in range(n)))
    support = shape.support(base)
    missing = [a for a in support if a not in patch.cells]
    if missing:
        raise MissingCellsError(missing)
    return Pattern.from_flat([patch.cells[a] for a in support], n)


def match_at(patch: Patch, p: Pattern, base: Address) -> bool:
    level, m = base
    cells = patch.cells
    for r, row in enumerate(p.rows):
        lv = level + r
        start = m << r
        for j, s in enumerate(row):
            v = cells.get((lv, start + j))
            if v is None:
                return False
            if s != WILDCARD and v != s:
                return False
    return True


def appears(patch: Patch, p: Pattern) -> list[Address]:
    """All bases ``g`` with ``p`` matching ``patch`` on ``g.U_n``; supports leaving the patch are skipped."""
    if p.n == 0:
        return []
    return [g for g in sorted(patch.cells) if match_at(patch, p, g)]


def linear_appears(patch: Patch, lp: LinearPattern, level: int) -> list[int]:
    row = patch.row(level)
    return [s for s in sorted(row) if lp.matches_at(row, s)]


# ---------------------------------------------------------------- text formats


def _strip_comment(line: str) -> str:
    # whole-line comments only: '#' is also the customary blank tape symbol
    stripped = line.strip()
    return "" if stripped.startswith("#") else stripped


def parse_alphabet_line(value: str, lineno: int) -> tuple[str, ...]:
    syms = tuple(value.split())
    if not syms:
        raise FormatError(lineno, "empty alphabet")
    return syms


def parse_patch(text: str) -> Patch:
    symbols = None
    halfplane = blank = None
    cells: dict[Address, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        key, _, value = line.partition(":")
        key = key.strip()
        if key == "alphabet":
            if symbols is not None:
                raise FormatError(lineno, "duplicate alphabet line")
            symbols = parse_alphabet_line(value, lineno)
        elif key == "halfplane":
            halfplane = value.strip()
        elif key == "blank":
            blank = value.strip()
        elif key == "cell":
            parts = value.split()
            if len(parts) != 3:
                raise FormatError(lineno, "cell line needs <level> <offset> <symbol>")
            try:
                a = Address(int(parts[0]), int(parts[1]))
            except ValueError:
                raise FormatError(lineno, "non-integer coordinate") from None
            if a in cells:
                raise FormatError(lineno, f"duplicate cell {a}")
            sym = parts[2]
            if symbols is None:
                raise FormatError(lineno, "cell before alphabet")
            if sym not in symbols and sym not in RESERVED:
                raise FormatError(lineno, f"unknown symbol {sym!r}")
            cells[a] = sym
        else:
            raise FormatError(lineno, f"unknown key {key!r}")
    if symbols is None:
        raise FormatError(0, "missing alphabet line")
    try:
        alphabet = Alphabet(symbols, blank=blank, halfplane=halfplane)
    except ValueError as exc:
        raise FormatError(0, str(exc)) from None
    return Patch(alphabet, cells, partial=WILDCARD in cells.values())


def format_alphabet(alphabet: Alphabet) -> list[str]:
    lines = ["alphabet: " + " ".join(alphabet.symbols)]
    if alphabet.halfplane is not None:
        lines.append(f"halfplane: {alphabet.halfplane}")
    if alphabet.blank is not None:
        lines.append(f"blank: {alphabet.blank}")
    return lines


def format_cells(cells: Mapping[Address, str]) -> list[str]:
    return [f"cell: {a.level} {a.offset} {cells[a]}" for a in sorted(cells)]


def serialize_patch(patch: Patch) -> str:
    return "\n".join(format_alphabet(patch.alphabet) + format_cells(patch.cells)) + "\n"


def parse_linear(text: str) -> list[LinearPattern]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        key, _, value = line.partition(":")
        if key.strip() != "linear":
            raise FormatError(lineno, f"unknown key {key.strip()!r}")
        parts = value.split()
        if len(parts) < 3:
            raise FormatError(lineno, "linear line needs <level> <start_offset> <symbols...>")
        out.append(LinearPattern(int(parts[0]), int(parts[1]), tuple(parts[2:])))
    return out


def serialize_linear(lp: LinearPattern) -> str:
    return f"linear: {lp.level} {lp.start_offset} " + " ".join(lp.symbols)

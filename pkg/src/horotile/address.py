"""Tile coordinates on the 2-fold horocyclic tessellation.

A tile is a pair ``(level, offset)``.  Level 0 is the origin row and levels grow
downward; every tile at level ``l`` sits above ``(l+1, 2n)`` and ``(l+1, 2n+1)``.

Words over ``a`` (alpha), ``A`` (alpha^-1), ``b`` (beta), ``B`` (beta^-1) move
between tiles.  Rows above level 0 are placed by a finite sequence of alignment
bits: bit ``i`` (1-based) shifts row ``-i`` so that the children of ``(-i, m)``
are ``(-i+1, 2m + c_i)`` and ``(-i+1, 2m + c_i + 1)``.  A word that climbs past
the rows covered by the choice sequence is invalid and yields ``None``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence

OFFSET_LIMIT = 1 << 63


class Generator(str, enum.Enum):
    A = "a"
    AINV = "A"
    B = "b"
    BINV = "B"


INVERSE = {"a": "A", "A": "a", "b": "B", "B": "b"}


class Address(NamedTuple):
    level: int
    offset: int

    def __str__(self) -> str:
        return f"({self.level},{self.offset})"


ORIGIN = Address(0, 0)

ChoiceSequence = Sequence[int]


def parse_word(text: str) -> str:
    """Validate a word written over ``aAbB``; whitespace is ignored."""
    word = "".join(text.split())
    if word in ("", "e", "ε"):
        return ""
    bad = set(word) - set(INVERSE)
    if bad:
        raise ValueError(f"invalid generator(s) {sorted(bad)} in word {text!r}")
    return word


def inverse_word(word: str) -> str:
    return "".join(INVERSE[g] for g in reversed(word))


def parse_address(text: str) -> Address:
    body = text.strip().strip("()")
    level, offset = (int(x) for x in body.split(","))
    return Address(level, offset)


def _checked(level: int, offset: int) -> Address:
    if not -OFFSET_LIMIT <= offset < OFFSET_LIMIT:
        raise OverflowError(f"offset {offset} at level {level} exceeds 64 bits")
    return Address(level, offset)


def _bit(choices: ChoiceSequence, row: int) -> Optional[int]:
    # alignment bit of row ``row`` (< 0); None if not covered
    i = -row
    if i > len(choices):
        return None
    return choices[i - 1]


def apply_move(a: Address, g: str, choices: ChoiceSequence = ()) -> Optional[Address]:
    level, n = a
    if g == "b":
        return _checked(level, n + 1)
    if g == "B":
        return _checked(level, n - 1)
    if g == "a":
        if level >= 0:
            return _checked(level + 1, 2 * n)
        c = _bit(choices, level)
        if c is None:
            return None
        return _checked(level + 1, 2 * n + c)
    if g == "A":
        if level >= 1:
            return Address(level - 1, n >> 1)
        c = _bit(choices, level - 1)
        if c is None:
            return None
        return Address(level - 1, (n - c) // 2)
    raise ValueError(f"unknown generator {g!r}")


def normalize(word: str, base: Address = ORIGIN, choices: ChoiceSequence = ()) -> Optional[Address]:
    """Apply ``word`` left to right from ``base``; ``None`` if the word leaves the tessellation."""
    level, n = base
    nchoices = len(choices)
    for g in word:
        # same moves as apply_move, inlined on plain ints
        if g == "b":
            n += 1
        elif g == "B":
            n -= 1
        elif g == "a":
            if level >= 0:
                n *= 2
            else:
                if -level > nchoices:
                    return None
                n = 2 * n + choices[-level - 1]
            level += 1
        elif g == "A":
            if level >= 1:
                n >>= 1
            else:
                if 1 - level > nchoices:
                    return None
                n = (n - choices[-level]) // 2
            level -= 1
        else:
            raise ValueError(f"unknown generator {g!r}")
        if not -OFFSET_LIMIT <= n < OFFSET_LIMIT:
            raise OverflowError(f"offset {n} at level {level} exceeds 64 bits")
    return Address(level, n)


def descend(base: Address, depth: int, choices: ChoiceSequence = ()) -> Address:
    """``base . a^depth`` (left-most descendant ``depth`` rows down)."""
    level, n = base
    if level >= 0:
        return _checked(level + depth, n << depth)
    at = normalize("a" * depth, base, choices)
    if at is None:
        raise ValueError(f"cannot descend from {base}")
    return at


def address_to_word(a: Address, choices: ChoiceSequence = ()) -> str:
    """A word reaching ``a`` from the origin: ``a^l b^n`` below the origin row, ``A^l b^k`` above it."""
    level, n = a
    if level >= 0:
        head = "a" * level
        start = 0
    else:
        head = "A" * (-level)
        top = normalize(head, ORIGIN, choices)
        if top is None:
            raise ValueError(f"address {a} is not reachable under choices {list(choices)}")
        start = top.offset
    shift = n - start
    return head + ("b" * shift if shift >= 0 else "B" * -shift)


@dataclass(frozen=True)
class AddressSet:
    """Duplicate-free tiles stored as sorted runs ``(level, start, stop)``."""

    runs: tuple[tuple[int, int, int], ...] = ()

    @classmethod
    def from_addresses(cls, addresses: Iterable[Address]) -> "AddressSet":
        runs: list[list[int]] = []
        for level, off in sorted(set(addresses)):
            if runs and runs[-1][0] == level and runs[-1][2] == off:
                runs[-1][2] += 1
            else:
                runs.append([level, off, off + 1])
        return cls(tuple(tuple(r) for r in runs))

    def __len__(self) -> int:
        return sum(stop - start for _, start, stop in self.runs)

    def __iter__(self) -> Iterator[Address]:
        for level, start, stop in self.runs:
            for off in range(start, stop):
                yield Address(level, off)

    def __contains__(self, a: object) -> bool:
        level, off = a  # type: ignore[misc]
        return any(lv == level and s <= off < e for lv, s, e in self.runs)

    @property
    def levels(self) -> list[int]:
        return sorted({lv for lv, _, _ in self.runs})

    def isdisjoint(self, other: "AddressSet") -> bool:
        return not any(a in other for a in self)


def support_un(n: int, base: Address = ORIGIN, choices: ChoiceSequence = ()) -> AddressSet:
    """Tiles ``a^p b^q`` for ``0 <= p < n``, ``0 <= q < 2^p`` under ``base``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    runs = []
    for p in range(n):
        level, start = descend(base, p, choices)
        runs.append((level, start, start + (1 << p)))
    return AddressSet(tuple(runs))


def support_ln(n: int, base: Address = ORIGIN, choices: ChoiceSequence = ()) -> AddressSet:
    """The row of ``2^(n+1)`` tiles ``a^(n+1) b^q`` under ``base``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    level, start = descend(base, n + 1, choices)
    return AddressSet(((level, start, start + (1 << (n + 1))),))

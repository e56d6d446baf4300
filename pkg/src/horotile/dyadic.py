"""The dyadic encoding: a second track copying every cell to its left child and
then down-right forever, so one row carries all rows above it.

Second-track rule on a cell ``(l, o)``:

* ``o = 2m``   -> first track of the parent ``(l-1, m)``
* ``o = 2m+1`` -> second track of the parent ``(l-1, m)``

Unrolling: with ``t`` trailing one-bits in ``o`` the value is the first track at
``(l-t-1, o >> (t+1))``.  A value sitting at ``(l, m)`` on the second track
reappears ``j`` rows down at offset ``(m+1)*2^j - 1``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Optional

from .address import Address
from .cft import AllowedFamily, RuleSet
from .pattern import (
    UNDETERMINED,
    WILDCARD,
    Alphabet,
    LinearPattern,
    Patch,
    Pattern,
    Window,
    appears,
    extract,
)


@dataclass
class DyadicPatch:
    track1: Patch
    track2: Patch

    @property
    def alphabet(self) -> Alphabet:
        return self.track1.alphabet


def trailing_ones(m: int, cap: int) -> int:
    """Number of trailing one-bits of ``m`` (two's complement), capped at ``cap``."""
    t = 0
    while t < cap and m & 1:
        m >>= 1
        t += 1
    return t


def pi2_value(patch: Patch, a: Address) -> str:
    """Second-track symbol at ``a`` without building the whole encoding."""
    cells = patch.cells
    level, o = a
    if a not in cells:
        return UNDETERMINED
    # climb while the offset is odd; every cell on the way must be present
    while o & 1:
        level, o = level - 1, o >> 1
        if (level, o) not in cells:
            return UNDETERMINED
    return cells.get(Address(level - 1, o >> 1), UNDETERMINED)


def phi(patch: Patch) -> DyadicPatch:
    """Row-by-row evaluation of the second track on every cell of ``patch``."""
    first = patch.cells
    second: dict[Address, str] = {}
    for a in sorted(first):
        level, o = a
        parent = Address(level - 1, o >> 1)
        if o & 1:
            second[a] = second.get(parent, UNDETERMINED) if parent in first else UNDETERMINED
        else:
            second[a] = first.get(parent, UNDETERMINED)
    return DyadicPatch(patch, Patch(patch.alphabet, second))


def local_violations(dp: DyadicPatch) -> list[Address]:
    """Cells whose second track disagrees with the radius-1 rule (cells without parent must be ``?``)."""
    bad = []
    first, second = dp.track1.cells, dp.track2.cells
    for a in sorted(first):
        parent = Address(a.level - 1, a.offset >> 1)
        if parent not in first:
            expected = UNDETERMINED
        elif a.offset & 1:
            expected = second.get(parent, UNDETERMINED)
        else:
            expected = first[parent]
        if second.get(a) != expected:
            bad.append(a)
    return bad


# ------------------------------------------------------------ transport offsets


def transport_offset(n: int, r: int, j: int, k: int = 1) -> int:
    """Offset, on the row ``n+k`` below a U_n base, carrying the pattern cell at row ``r``, column ``j``."""
    d = n + k - r
    return (j << d) + (1 << (d - 1)) - 1


def tilde_k(p: Pattern, k: int) -> LinearPattern:
    """Partial linear pattern ``k`` rows below the bottom of ``p`` carrying all of ``p``'s cells."""
    if p.width != 1 or p.n < 1:
        raise ValueError("tilde needs a pattern on U_n with n >= 1")
    if k < 1:
        raise ValueError("k must be >= 1")
    n = p.n
    symbols = [WILDCARD] * (1 << (n + k))
    for r, j, s in p.relative_cells():
        symbols[transport_offset(n, r, j, k)] = s
    return LinearPattern(n + k, 0, tuple(symbols))


def tilde(p: Pattern) -> LinearPattern:
    return tilde_k(p, 1)


def split(p: Pattern, kmax: int) -> list[LinearPattern]:
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    return [tilde_k(p, k) for k in range(1, kmax + 1)]


def reconstruct(lp: LinearPattern, n: int, k: int = 1) -> Pattern:
    if len(lp) != 1 << (n + k):
        raise ValueError(f"linear pattern must have length {1 << (n + k)}")
    rows = []
    for r in range(n):
        row = []
        for j in range(1 << r):
            s = lp.symbols[transport_offset(n, r, j, k)]
            if s == WILDCARD:
                raise ValueError(f"transport offset {transport_offset(n, r, j, k)} is undetermined")
            row.append(s)
        rows.append(tuple(row))
    return Pattern(tuple(rows))


def literal_offset(i: int, k: int) -> int:
    """The alternative closed form 2^i + 2^k - 1 for the copy of tilde-entry ``i``; reported, not relied on."""
    return (1 << i) + (1 << k) - 1


def derived_offset(i: int, k: int) -> int:
    """Copy of tilde-entry ``i`` on the row ``k-1`` further down (from the down-right recursion)."""
    return ((i + 1) << (k - 1)) - 1


def aligned_matches(track2: Patch, p: Pattern, base: Address, kmax: int) -> list[int]:
    """The ``k`` for which ``tilde_k(p, k)`` matches ``track2`` in aligned position under ``base``."""
    level, m = base
    hits = []
    for k in range(1, kmax + 1):
        row_level = level + p.n + k
        start = m << (p.n + k)
        lp = tilde_k(p, k)
        if all(Address(row_level, start + i) in track2.cells for i in range(len(lp))):
            if all(track2.cells[Address(row_level, start + i)] == s for i, s in lp.determined()):
                hits.append(k)
    return hits


# ------------------------------------------------------------ lifted rules


def pair_symbol(a: str, b: str) -> str:
    return f"{a}:{b}"


def pair_alphabet(alphabet: Alphabet) -> Alphabet:
    second = list(alphabet.symbols) + [UNDETERMINED]
    return Alphabet(tuple(pair_symbol(a, b) for a in alphabet.symbols for b in second))


def product_patch(dp: DyadicPatch) -> Patch:
    pa = pair_alphabet(dp.alphabet)
    return Patch(pa, {a: pair_symbol(s, dp.track2.cells[a]) for a, s in dp.track1.cells.items()})


def lift_rules(rules: RuleSet) -> RuleSet:
    """Rules over pairs: first-track copies of ``rules`` plus the second-track local rule."""
    pa = pair_alphabet(rules.alphabet)
    second = list(rules.alphabet.symbols) + [UNDETERMINED]
    forbidden = []
    for p in rules.forbidden:
        flat = p.flat()
        slots = [i for i, s in enumerate(flat) if s != WILDCARD]
        for combo in itertools.product(second, repeat=len(slots)):
            lifted = list(flat)
            for i, c in zip(slots, combo):
                lifted[i] = pair_symbol(flat[i], c)
            forbidden.append(Pattern.from_flat(lifted, p.n, p.width))
    allowed = set()
    for pf in rules.alphabet.symbols:
        for ps in second:
            for x0, x1 in itertools.product(rules.alphabet.symbols, repeat=2):
                allowed.add((pair_symbol(pf, ps), pair_symbol(x0, pf), pair_symbol(x1, ps)))
    return RuleSet(pa, forbidden, [AllowedFamily(2, 1, frozenset(allowed), name="dyadic")])


# ------------------------------------------------------------ proposition checks


@dataclass
class PropReport:
    prop: int
    n: int
    instances: int = 0
    counterexamples: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return not self.counterexamples

    def lines(self) -> list[str]:
        out = [f"prop {self.prop} n={self.n}: {self.instances} instances, {len(self.counterexamples)} counterexamples"]
        for key, value in self.info.items():
            out.append(f"  {key}: {value}")
        for ce in self.counterexamples[:10]:
            out.append(f"  counterexample: {ce}")
        return out


BINARY = Alphabet(("0", "1"))


def all_patterns(n: int, alphabet: Alphabet = BINARY):
    size = (1 << n) - 1
    for combo in itertools.product(alphabet.symbols, repeat=size):
        yield Pattern.from_flat(combo, n)


def random_patch(window: Window, alphabet: Alphabet, rng: random.Random) -> Patch:
    return Patch(alphabet, {a: rng.choice(alphabet.symbols) for a in window.cells()})


def plant(patch: Patch, p: Pattern, base: Address) -> Patch:
    cells = dict(patch.cells)
    cells.update(zip(p.support(base), p.flat()))
    return Patch(patch.alphabet, cells)


def _bases(window: Window, depth_needed: int) -> list[Address]:
    return [Address(lv, o) for lv in window.levels() if lv + depth_needed <= window.bottom for o in window.row_range(lv)]


def verify_prop(prop: int, n: int, trials: int = 200, rng_seed: Optional[int] = 0, kmax: int = 4) -> PropReport:
    """Brute-force check of the pattern-transport statements on small instances."""
    if not 1 <= n <= 6:
        raise ValueError("n must be in 1..6")
    rng = random.Random(rng_seed)
    report = PropReport(prop, n)
    if prop == 1:
        _verify_prop1(report, n, trials, rng)
    elif prop == 2:
        _verify_prop2(report, n, trials, rng, kmax)
    elif prop == 3:
        _verify_prop3(report, n, trials, rng)
    else:
        raise ValueError("prop must be 1, 2 or 3")
    return report


def _verify_prop1(report: PropReport, n: int, trials: int, rng: random.Random) -> None:
    seen = {}
    if (1 << n) - 1 <= 15:
        pats = list(all_patterns(n))
    else:
        pats = [Pattern.from_flat([rng.choice("01") for _ in range((1 << n) - 1)], n) for _ in range(trials)]
    for p in pats:
        report.instances += 1
        lp = tilde(p)
        if reconstruct(lp, n) != p:
            report.counterexamples.append(("round-trip", p.flat()))
        key = lp.symbols
        if key in seen and seen[key] != p:
            report.counterexamples.append(("not injective", p.flat(), seen[key].flat()))
        seen[key] = p
    # appearance equivalence on windows deep enough to hold L_n under their top row
    for _ in range(trials):
        window = Window(0, n + 1, 0, rng.choice((1, 2, 3)))
        x = random_patch(window, BINARY, rng)
        dp = phi(x)
        bases = _bases(window, n + 1)
        if rng.random() < 0.5:
            p = extract(x, rng.choice(bases), n)
        else:
            p = rng.choice(pats)
        found = set(appears(x, p))
        lp = tilde(p)
        for g in bases:
            row = dp.track2.row(g.level + n + 1)
            detected = lp.matches_at(row, g.offset << (n + 1))
            if detected != (g in found):
                report.counterexamples.append(("appearance", p.flat(), g))
        report.instances += 1
    report.info["patterns"] = len(pats)


def _verify_prop2(report: PropReport, n: int, trials: int, rng: random.Random, kmax: int) -> None:
    literal_ok = literal_bad = literal_off_window = 0
    derived_bad = 0
    for _ in range(trials):
        depth = n + kmax
        window = Window(0, depth, 0, 1)
        x = random_patch(window, BINARY, rng)
        dp = phi(x)
        g = Address(0, 0)
        p = extract(x, g, n)
        lp1 = tilde(p)
        for k in range(1, kmax + 1):
            lpk = tilde_k(p, k)
            row = dp.track2.row(n + k)
            for i, s in lpk.determined():
                if row.get(i) != s:
                    report.counterexamples.append(("tilde_k", p.flat(), k, i))
            # copies of tilde entries: derived vs literal positions
            for i, s in lp1.determined():
                d = derived_offset(i, k)
                if dp.track2.cells.get(Address(n + k, d)) != s:
                    derived_bad += 1
                lit_row = n + k
                lit = literal_offset(i, k)
                if lit >= (1 << lit_row):
                    literal_off_window += 1
                elif dp.track2.cells.get(Address(lit_row, lit)) == s:
                    literal_ok += 1
                else:
                    literal_bad += 1
        report.instances += 1
    if derived_bad:
        report.counterexamples.append(("derived offsets", derived_bad))
    report.info["derived formula (i+1)*2^(k-1)-1 on row n+k"] = f"{derived_bad} mismatches"
    report.info["literal formula 2^i+2^k-1 on row n+k"] = (
        f"{literal_ok} agree, {literal_bad} disagree, {literal_off_window} outside the row"
    )


def _verify_prop3(report: PropReport, n: int, trials: int, rng: random.Random) -> None:
    pats = list(all_patterns(n)) if n <= 3 else None
    for _ in range(trials):
        depth = rng.randint(n + 1, 8)
        window = Window(0, depth, 0, 1 if depth > 6 else rng.choice((1, 2)))
        x = random_patch(window, BINARY, rng)
        dp = phi(x)
        bases = _bases(window, n)
        if rng.random() < 0.5:
            p = extract(x, rng.choice(bases), n)
        else:
            p = rng.choice(pats) if pats else Pattern.from_flat([rng.choice("01") for _ in range((1 << n) - 1)], n)
        found = set(appears(x, p))
        for g in bases:
            if g.level + n + 1 > window.bottom:
                continue
            kmax = window.bottom - g.level - n
            detected = bool(aligned_matches(dp.track2, p, g, kmax))
            if detected != (g in found):
                report.counterexamples.append(("split", p.flat(), g))
        report.instances += 1

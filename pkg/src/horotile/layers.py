"""Four stacked layers over one window: a colouring, computation zones, its
dyadic second track, and the trace of a detecting machine running in every zone.

Zones live on layer 2.  Below the half-plane rows (kind ``c``) comes a row of
alternating one-cell zones ``a* b* a* b* ...``.  A zone keeps its kind while it
widens row by row; when a generation closes, the next row is a ``*``-row where
each ``a`` zone merges with the ``b`` zone on its right.  A generation whose
zones start ``W`` cells wide and stay open for ``h`` rows is followed by zones
of width ``W * 2^(h+2)``, ``h`` counting the rows below the ``*``-row.

The machine of a zone reads the second track along the zone's top row, three
zone-widths wide (the detecting tape).  On row ``t`` it takes the ``t``-th
enumerated pattern and looks for an aligned copy of one of its split members.
A hit turns the head into ``qf`` for the rest of the zone.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Optional

from .address import Address
from .cft import AllowedFamily, Enumerator, RowConstraint, RuleSet, check, enforce_half_plane
from .dyadic import DyadicPatch, local_violations, phi, tilde_k
from .pattern import Alphabet, FormatError, Patch, Pattern, Window, _strip_comment, parse_patch, serialize_patch

DOT = "•"
EMPTY = "∅"
KINDS = ("a", "b", "a*", "b*", "c")
ZONE_SYMBOLS = tuple(k + m for k in KINDS for m in (DOT, EMPTY))
HALFPLANE_ZONE = "c" + EMPTY
ZONE_ALPHABET = Alphabet(ZONE_SYMBOLS, halfplane=HALFPLANE_ZONE)

BLANK4 = "#"
TAPE4 = "."
SCAN, IDLE, QF = "scan", "idle", "qf"
LAYER4_ALPHABET = Alphabet((TAPE4, BLANK4, SCAN, IDLE, QF), blank=BLANK4)


class ScheduleError(ValueError):
    """The schedule or the first layer does not fit the window."""


class MalformedLayer(ValueError):
    pass


def kind(s: str) -> str:
    return s[:-1]


def mark(s: str) -> str:
    return s[-1]


def base_kind(s: str) -> str:
    return s[0]


def is_star(s: str) -> bool:
    return s.endswith("*" + DOT) or s.endswith("*" + EMPTY)


def is_c(s: str) -> bool:
    return s[0] == "c"


def zone_symbol(k: str, m: str) -> str:
    return k + m


# ------------------------------------------------------------------ zone rules


def _symbol_ok(s: str) -> bool:
    if is_star(s) and mark(s) != DOT:
        return False
    if is_c(s) and mark(s) != EMPTY:
        return False
    return True


def _parent_ok(p: str, left: str, right: str) -> bool:
    """Constraints between one cell and its two children."""
    if (mark(left) == DOT) != (is_star(left) or mark(p) == DOT):
        return False
    if (mark(right) == DOT) != is_star(right):
        return False
    if is_star(left) != is_star(right) or is_c(left) != is_c(right):
        return False
    if is_c(p):
        return (kind(left), kind(right)) in (("c", "c"), ("a*", "b*"))
    if is_c(left):
        return False
    if is_star(p):
        return not is_star(left) and kind(left) == kind(right) == base_kind(p)
    if is_star(left):
        return kind(left) == kind(right)
    return kind(left) == kind(right) == kind(p)


def _pair_ok(x: str, y: str, kids: tuple[str, str, str, str]) -> bool:
    """Constraints between two horizontal neighbours and their four children."""
    if is_c(x) != is_c(y) or is_star(x) != is_star(y):
        return False
    if len({is_c(k) for k in kids}) > 1 or len({is_star(k) for k in kids}) > 1:
        return False
    if not is_c(x) and not is_star(x) and is_star(kids[0]):
        same = base_kind(kids[0]) == base_kind(kids[2])
        if kind(x) == kind(y) or (kind(x), kind(y)) == ("a", "b"):
            return same
        return not same
    return True


@functools.lru_cache(maxsize=None)
def zone_rules() -> RuleSet:
    """Allowed colourings of a cell with its children, and of two neighbours with their four children."""
    syms = [s for s in ZONE_SYMBOLS if _symbol_ok(s)]
    single = set()
    for p, l, r in itertools.product(syms, repeat=3):
        if _parent_ok(p, l, r):
            single.add((p, l, r))
    by_parent: dict[str, list[tuple[str, str]]] = {}
    for p, l, r in single:
        by_parent.setdefault(p, []).append((l, r))
    pair = set()
    for x, y in itertools.product(syms, repeat=2):
        for (x0, x1), (y0, y1) in itertools.product(by_parent.get(x, []), by_parent.get(y, [])):
            if _pair_ok(x, y, (x0, x1, y0, y1)):
                pair.add((x, y, x0, x1, y0, y1))
    return RuleSet(
        ZONE_ALPHABET,
        [],
        [
            AllowedFamily(2, 1, frozenset(single), name="zone-vertical"),
            AllowedFamily(2, 2, frozenset(pair), name="zone-pair"),
        ],
    )


# ------------------------------------------------------------------ schedules


@dataclass(frozen=True)
class ZoneSchedule:
    """Rows below the ``*``-row for every zone generation; ``auto`` fills the rest with the zone width."""

    heights: tuple[int, ...] = ()
    auto: bool = True

    def __post_init__(self):
        if any(h < 1 for h in self.heights):
            raise ValueError("zone heights must be >= 1")

    def height(self, generation: int, width: int) -> int:
        if generation < len(self.heights):
            return self.heights[generation]
        if self.auto:
            return width
        raise ScheduleError(f"schedule has no height for generation {generation}")


def parse_schedule(text: str) -> ZoneSchedule:
    heights: dict[int, int] = {}
    auto = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        if line == "auto":
            auto = True
            continue
        key, _, value = line.partition(":")
        parts = value.split()
        if key.strip() != "zone" or len(parts) != 3 or parts[1] != "close_at":
            raise FormatError(lineno, "expected 'zone: <generation> close_at <height>' or 'auto'")
        try:
            g, h = int(parts[0]), int(parts[2])
        except ValueError:
            raise FormatError(lineno, "non-integer generation or height") from None
        if g in heights:
            raise FormatError(lineno, f"duplicate generation {g}")
        if h < 1:
            raise FormatError(lineno, "height must be >= 1")
        heights[g] = h
    if sorted(heights) != list(range(len(heights))):
        raise FormatError(0, "generations must be numbered 0, 1, 2, ... without gaps")
    return ZoneSchedule(tuple(heights[g] for g in range(len(heights))), auto)


def format_schedule(schedule: ZoneSchedule) -> str:
    lines = [f"zone: {g} close_at {h}" for g, h in enumerate(schedule.heights)]
    if schedule.auto:
        lines.append("auto")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Generation:
    index: int
    top: int  # level of its *-row
    width: int  # cells of each zone on the *-row
    height: int  # rows below the *-row


def generations(first_row: int, bottom: int, schedule: ZoneSchedule) -> list[Generation]:
    """Zone generations starting at or above ``bottom``."""
    out = []
    top, width, g = first_row, 1, 0
    while top <= bottom:
        h = schedule.height(g, width)
        out.append(Generation(g, top, width, h))
        top, width, g = top + h + 1, width << (h + 2), g + 1
    return out


# ------------------------------------------------------------------ zones


@dataclass(frozen=True)
class Zone:
    kind: str
    base: Address
    width: int
    height: int
    truncated: bool = False

    def rows(self) -> list[tuple[int, range]]:
        """The ``*``-row followed by the ``height`` rows below it."""
        lv, o = self.base
        return [(lv + t, range(o << t, (o + self.width) << t)) for t in range(self.height + 1)]


def zones_of(layer2: Patch) -> list[Zone]:
    """Maximal monochrome zones of a zone layer, ordered by (top level, offset)."""
    finished: list[Zone] = []
    open_zones: dict[tuple[int, int], list] = {}  # run (start, stop) on the previous level -> zone data
    prev_level = None
    for level in layer2.levels():
        row = layer2.row(level)
        lo, hi = min(row), max(row) + 1
        if sorted(row) != list(range(lo, hi)):
            raise MalformedLayer(f"level {level} is not contiguous")
        runs = []
        for o in range(lo, hi):
            s = row[o]
            if is_c(s):
                continue
            k = base_kind(s)
            if runs and runs[-1][1] == o and runs[-1][2] == k and runs[-1][3] == is_star(s):
                runs[-1][1] = o + 1
            else:
                runs.append([o, o + 1, k, is_star(s)])
        contiguous = prev_level is not None and prev_level == level - 1
        nxt: dict[tuple[int, int], list] = {}
        carried = set()
        for start, stop, k, star in runs:
            edge = start == lo or stop == hi
            if star:
                nxt[(start, stop)] = [k, Address(level, start), stop - start, 0, edge]
                continue
            key = (start >> 1, (stop + 1) >> 1)
            z = open_zones.get(key) if contiguous else None
            if z is None or z[0] != k:
                if contiguous and open_zones:
                    raise MalformedLayer(f"run {k}[{start},{stop}) at level {level} has no zone above it")
                nxt[(start, stop)] = [k, Address(level, start), stop - start, 0, True]
                continue
            z[3] += 1
            z[4] = z[4] or edge
            carried.add(key)
            nxt[(start, stop)] = z
        for key, z in open_zones.items():
            if key not in carried:
                finished.append(Zone(z[0], z[1], z[2], z[3], z[4]))
        open_zones = nxt
        prev_level = level
    finished.extend(Zone(z[0], z[1], z[2], z[3], z[4]) for z in open_zones.values())
    return sorted(finished, key=lambda z: (z.base.level, z.base.offset))


def zone_property_violations(layer2: Patch, edge_zones: bool = False) -> list[str]:
    """Direct check of the zone-layer properties, independent of :func:`zone_rules`.

    P1 the first non-c row is ``a* b*`` alternating; P2 a ``*`` cell has
    children of its kind; P3 complete zones are ``2^k`` wide; P4 kinds
    alternate along rows; P5 kinds change downward only into ``*`` cells.
    Zones cut by the window edge enter P3 only with ``edge_zones``.
    """
    out = []
    cells = layer2.cells
    levels = layer2.levels()
    first = next((lv for lv in levels if any(not is_c(s) for s in layer2.row(lv).values())), None)
    if first is not None and first > levels[0]:
        row = layer2.row(first)
        for o, s in sorted(row.items()):
            if is_c(s) or not is_star(s) or base_kind(s) != ("a" if o % 2 == 0 else "b"):
                out.append(f"P1 {Address(first, o)}")
    for a, s in sorted(cells.items()):
        for child in (Address(a.level + 1, 2 * a.offset), Address(a.level + 1, 2 * a.offset + 1)):
            c = cells.get(child)
            if c is None:
                continue
            if is_star(s) and (is_star(c) or is_c(c) or base_kind(c) != base_kind(s)):
                out.append(f"P2 {child}")
            if not is_c(s) and not is_star(c) and (is_c(c) or base_kind(c) != base_kind(s)):
                out.append(f"P5 {child}")
    for lv in levels:
        row = sorted(layer2.row(lv).items())
        runs = [k for k, _ in itertools.groupby(row, key=lambda t: base_kind(t[1]))]
        if any(k == "c" for k in runs) and len(runs) > 1:
            out.append(f"P4 level {lv} mixes c with zones")
        for x, y in zip(runs, runs[1:]):
            if x == y:
                out.append(f"P4 level {lv}")
    try:
        zones = zones_of(layer2)
    except MalformedLayer as exc:
        return out + [f"P3 {exc}"]
    for z in zones:
        if (edge_zones or not z.truncated) and z.width & (z.width - 1):
            out.append(f"P3 zone at {z.base} width {z.width}")
    return out


# ------------------------------------------------------------------ detecting machine


@dataclass
class DetectingTape:
    zone: Zone
    contents: dict[int, str]  # offset -> second-track symbol, restricted to the window

    @property
    def span(self) -> range:
        lv, o = self.zone.base
        w = self.zone.width
        return range(o - w, o + 2 * w)


def detecting_tape(zone: Zone, layer3: Patch) -> DetectingTape:
    lv, o = zone.base
    w = zone.width
    row = layer3.row(lv)
    return DetectingTape(zone, {i: row[i] for i in range(o - w, o + 2 * w) if i in row})


def detects(tape: DetectingTape, p: Pattern) -> bool:
    """Does an aligned copy of some split member of ``p`` lie on the tape?"""
    if p.width != 1 or p.n < 1:
        return False
    span = tape.span
    for k in itertools.count(1):
        length = 1 << (p.n + k)
        if length > len(span):
            return False
        lp = tilde_k(p, k)
        start = -(-span.start // length) * length
        while start + length <= span.stop:
            if lp.matches_at(tape.contents, start):
                return True
            start += length


def _complete(z: Zone, width: int, layer2: Patch) -> Zone:
    # a zone cut by the window edge gets the width of its generation
    if z.width == width:
        return z
    lv, o = z.base
    if Address(lv, o - 1) not in layer2.cells:
        o = o + z.width - width
    return Zone(z.kind, Address(lv, o), width, z.height, True)


def machine_trace(layer2: Patch, layer3: Patch, patterns: list[Pattern]) -> dict[Address, str]:
    """Layer-4 symbols for every cell of ``layer2``."""
    out = {a: BLANK4 for a in layer2.cells}
    zones = zones_of(layer2)
    widest: dict[int, int] = {}
    for z in zones:
        widest[z.base.level] = max(widest.get(z.base.level, 0), z.width)
    for z in zones:
        top = layer2.cells.get(z.base)
        if top is None or not is_star(top):
            continue  # zone begins above the window
        z = _complete(z, widest[z.base.level], layer2)
        tape = detecting_tape(z, layer3)
        hit_col: Optional[int] = None
        for t, (lv, cols) in enumerate(z.rows()):
            col = min(t, z.width - 1) if hit_col is None else hit_col
            if hit_col is None and t < len(patterns) and detects(tape, patterns[t]):
                hit_col = col
            if hit_col is not None:
                head = QF
            elif t < len(patterns):
                head = SCAN
            else:
                head = IDLE
            for j in range(z.width):
                a = Address(lv, cols.start + (j << t))
                if a in out:
                    out[a] = head if j == col else TAPE4
    return out


# ------------------------------------------------------------------ four layers


@dataclass
class FourLayerPatch:
    layer1: Patch
    layer2: Patch
    layer3: Patch
    layer4: Patch
    boundary: int

    @property
    def halfplane(self) -> str:
        hp = self.layer1.alphabet.halfplane
        if hp is None:
            raise ValueError("first layer alphabet has no half-plane symbol")
        return hp


@dataclass(frozen=True)
class LayerViolation:
    level: int
    offset: int
    rule: str
    detail: str = ""

    def __str__(self) -> str:
        return f"({self.level},{self.offset}) {self.rule}" + (f": {self.detail}" if self.detail else "")


@dataclass
class LayerReport:
    violations: list = field(default_factory=list)
    qf: list = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.violations

    def lines(self) -> list[str]:
        out = [str(v) for v in self.violations]
        out += [f"{a} qf terminal" for a in self.qf]
        return out


def _first_zone_row(x: Patch, hp: str) -> int:
    hp_levels = [lv for lv in x.levels() if all(s == hp for s in x.row(lv).values())]
    if not hp_levels:
        raise ScheduleError("the first layer has no half-plane row inside the window")
    return max(hp_levels) + 1


def build_zone_layer(x: Patch, hp: str, schedule: ZoneSchedule) -> Patch:
    levels = x.levels()
    first = _first_zone_row(x, hp)
    gens = generations(first, levels[-1], schedule)
    cells = {}
    for a in x.cells:
        lv, o = a
        if lv < first:
            cells[a] = HALFPLANE_ZONE
            continue
        g = next(g for g in reversed(gens) if g.top <= lv)
        t = lv - g.top
        j = o // (g.width << t)
        k = "a" if j % 2 == 0 else "b"
        if t == 0:
            cells[a] = zone_symbol(k + "*", DOT)
        else:
            cells[a] = zone_symbol(k, DOT if o % (1 << t) == 0 else EMPTY)
    return Patch(ZONE_ALPHABET, cells)


def build_layers(x: Patch, rc: RowConstraint, schedule: ZoneSchedule, enum: Enumerator, budget: int) -> FourLayerPatch:
    hp = rc.halfplane_symbol
    if x.alphabet.halfplane != hp:
        x = Patch(Alphabet(x.alphabet.symbols, x.alphabet.blank, hp), x.cells)
    if enforce_half_plane(x, rc):
        raise ScheduleError("the first layer breaks the half-plane constraint")
    layer2 = build_zone_layer(x, hp, schedule)
    layer3 = phi(x).track2
    layer4 = Patch(LAYER4_ALPHABET, machine_trace(layer2, layer3, enum.take(budget)))
    return FourLayerPatch(x, layer2, layer3, layer4, rc.boundary_level)


def check_layers(flp: FourLayerPatch, enum: Enumerator, budget: int) -> LayerReport:
    """Every cross-layer rule, plus every ``qf`` cell as a terminal finding; ordered by (level, offset, rule)."""
    found = []
    hp = flp.halfplane
    l1, l2, l3, l4 = flp.layer1, flp.layer2, flp.layer3, flp.layer4
    if not (set(l1.cells) == set(l2.cells) == set(l3.cells) == set(l4.cells)):
        found.append(LayerViolation(0, 0, "shape", "layers cover different cells"))
    for a in enforce_half_plane(l1, RowConstraint(hp, flp.boundary)):
        found.append(LayerViolation(a.level, a.offset, "halfplane"))
    for a, s in l1.cells.items():
        z = l2.cells.get(a)
        if z is not None and (s == hp) != is_c(z):
            found.append(LayerViolation(a.level, a.offset, "approx-c"))
    for a, s in l2.cells.items():
        if is_star(s) and mark(s) != DOT:
            found.append(LayerViolation(a.level, a.offset, "star-dot"))
    if l2.alphabet.symbols == ZONE_ALPHABET.symbols:
        for idx, g in check(l2, zone_rules()):
            found.append(LayerViolation(g.level, g.offset, "zone-rules", zone_rules().allowed[idx].name))
    for a in local_violations(DyadicPatch(l1, l3)):
        found.append(LayerViolation(a.level, a.offset, "layer3"))
    try:
        expected = machine_trace(l2, l3, enum.take(budget))
    except MalformedLayer as exc:
        found.append(LayerViolation(0, 0, "layer4", str(exc)))
    else:
        for a, s in l4.cells.items():
            if expected.get(a) != s:
                found.append(LayerViolation(a.level, a.offset, "layer4", f"expected {expected.get(a)}, found {s}"))
    found.sort(key=lambda v: (v.level, v.offset, v.rule))
    qf = sorted(a for a, s in l4.cells.items() if s == QF)
    return LayerReport(found, qf)


def project(flp: FourLayerPatch) -> Patch:
    return flp.layer1


def serialize_layers(flp: FourLayerPatch) -> str:
    parts = [f"boundary: {flp.boundary}\n"]
    for i, layer in enumerate((flp.layer1, flp.layer2, flp.layer3, flp.layer4), 1):
        parts.append(f"layer: {i}\n")
        parts.append(serialize_patch(layer))
    return "".join(parts)


def parse_layers(text: str) -> FourLayerPatch:
    boundary = None
    blocks: list[list[str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        key, _, value = line.partition(":")
        if key.strip() == "boundary":
            boundary = int(value)
        elif key.strip() == "layer":
            if int(value) != len(blocks) + 1:
                raise FormatError(lineno, "layers must appear in order 1..4")
            blocks.append([])
        elif line:
            if not blocks:
                raise FormatError(lineno, "content before the first 'layer:' line")
            blocks[-1].append(raw)
    if len(blocks) != 4:
        raise FormatError(0, f"expected 4 layers, found {len(blocks)}")
    if boundary is None:
        raise FormatError(0, "missing boundary line")
    l1, l2, l3, l4 = (parse_patch("\n".join(b)) for b in blocks)
    return FourLayerPatch(l1, l2, l3, l4, boundary)


def window_of(patch: Patch) -> Optional[Window]:
    """The trapezoid a patch fills, if it fills one exactly."""
    if not patch.cells:
        return None
    levels = patch.levels()
    top = patch.row(levels[0])
    w = Window(levels[0], levels[-1], min(top), max(top) + 1)
    return w if set(w.cells()) == set(patch.cells) else None

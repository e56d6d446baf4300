"""A small instance family for exercising the four-layer construction on both sides.

Layer 1 is drawn over ``0 1`` below a half-plane row.  Either the forbidden
pattern is kept out by a greedy repair, or it is planted at a chosen tile.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .address import Address
from .cft import ListEnumerator, RowConstraint
from .dyadic import plant
from .layers import FourLayerPatch, LayerReport, ZoneSchedule, build_layers, check_layers
from .pattern import Alphabet, Patch, Pattern, Window

HP = "≈"


@dataclass(frozen=True)
class WitnessConfig:
    depth: int = 8
    budget: int = 10
    schedule: ZoneSchedule = field(default_factory=lambda: ZoneSchedule((1, 1), auto=True))
    plant_levels: tuple[int, ...] = (1, 2)

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(("0", "1", HP), halfplane=HP)

    @property
    def window(self) -> Window:
        return Window(0, self.depth, 0, 1)

    @property
    def constraint(self) -> RowConstraint:
        return RowConstraint(HP, 0)

    @property
    def pattern(self) -> Pattern:
        # a 1 whose children read 0 1
        return Pattern((("1",), ("0", "1")))

    def enumerator(self) -> ListEnumerator:
        return ListEnumerator(self.alphabet, [self.pattern])


def avoiding_patch(cfg: WitnessConfig, rng: random.Random) -> Patch:
    """Random layer 1 in which the pattern never occurs."""
    cells: dict[Address, str] = {}
    for a in cfg.window.cells():
        if a.level == 0:
            cells[a] = HP
            continue
        s = rng.choice("01")
        if a.level >= 2 and a.offset % 2 == 1 and s == "1":
            if cells[Address(a.level - 1, a.offset >> 1)] == "1" and cells[Address(a.level, a.offset - 1)] == "0":
                s = "0"
        cells[a] = s
    return Patch(cfg.alphabet, cells)


def planted_patch(cfg: WitnessConfig, rng: random.Random) -> tuple[Patch, Address]:
    """Random avoiding layer 1 with the pattern then written at a random tile below the half-plane."""
    x = avoiding_patch(cfg, rng)
    lv = rng.choice(cfg.plant_levels)
    at = Address(lv, rng.randrange(1 << lv))
    return plant(x, cfg.pattern, at), at


def build_and_check(cfg: WitnessConfig, x: Patch) -> tuple[FourLayerPatch, LayerReport]:
    enum = cfg.enumerator()
    flp = build_layers(x, cfg.constraint, cfg.schedule, enum, cfg.budget)
    return flp, check_layers(flp, enum, cfg.budget)

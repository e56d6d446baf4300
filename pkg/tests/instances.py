"""Random small rule sets and windows, shared by the solver tests."""

import itertools
import random

from horotile.cft import AllowedFamily, RowConstraint, RuleSet
from horotile.pattern import Alphabet, Pattern, Window

SHAPES = [(0, 0, 0, 4), (0, 0, 2, 8), (0, 1, 0, 1), (0, 1, 0, 2), (0, 1, 1, 4), (0, 2, 0, 1), (0, 1, 0, 3),
          (0, 2, 0, 2), (0, 3, 0, 1), (1, 2, 0, 4), (0, 1, 0, 5), (0, 1, 0, 6), (0, 2, 0, 3), (0, 1, 0, 8)]


def window_size(top, bottom, left, right):
    return sum((right - left) << (lv - top) for lv in range(top, bottom + 1))


def random_instance(rng: random.Random, max_assignments: int = 1 << 24):
    """(window, rules, row constraint or None) with at most 24 cells and at most 3 symbols."""
    while True:
        k = rng.choice([2, 2, 3])
        shape = rng.choice(SHAPES)
        if k ** window_size(*shape) <= max_assignments:
            break
    symbols = tuple("xyz"[:k])
    forbidden = []
    for _ in range(rng.randrange(0, 5)):
        n = rng.choice([1, 2, 2])
        width = rng.choice([1, 1, 2]) if n == 1 else 1
        size = width * ((1 << n) - 1)
        flat = [rng.choice(symbols + ("*",)) for _ in range(size)]
        if all(s == "*" for s in flat):
            flat[0] = rng.choice(symbols)
        forbidden.append(Pattern.from_flat(flat, n, width))
    allowed = []
    if rng.random() < 0.4:
        n, width = rng.choice([(2, 1), (1, 2)])
        size = width * ((1 << n) - 1)
        pats = set()
        for t in itertools.product(symbols, repeat=size):
            if rng.random() < 0.6:
                pats.add(t)
        allowed.append(AllowedFamily(n, width, frozenset(pats), "random"))
    rc = None
    if rng.random() < 0.3:
        rc = RowConstraint(symbols[0], shape[0] + rng.choice([-1, 0]))
    return Window(*shape), RuleSet(Alphabet(symbols), forbidden, allowed), rc


def oracle_args(rules: RuleSet):
    forbidden = [(p.n, p.width, p.flat()) for p in rules.forbidden]
    allowed = [(f.n, f.width, f.patterns) for f in rules.allowed]
    return rules.alphabet.symbols, forbidden, allowed

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from horotile.address import (
    ORIGIN,
    Address,
    AddressSet,
    address_to_word,
    apply_move,
    descend,
    inverse_word,
    normalize,
    parse_address,
    parse_word,
    support_ln,
    support_un,
)
from oracles import interval_walk

words = st.text(alphabet="aAbB", max_size=25)
choice_seqs = st.lists(st.integers(0, 1), max_size=12).map(tuple)


def test_relation_example():
    assert normalize("abb") == Address(1, 2)
    assert normalize("ba") == Address(1, 2)
    assert str(normalize("abb")) == "(1,2)"


def test_empty_word_is_base():
    assert normalize("") == ORIGIN
    assert normalize("", Address(3, 5)) == Address(3, 5)


def test_climbing_needs_choices():
    assert normalize("A") is None
    assert normalize("A", choices=(0,)) == Address(-1, 0)
    assert normalize("A", choices=(1,)) == Address(-1, -1)
    # two rows up with choices (1, 1): row -1 is shifted by 1, row -2 by 3
    assert normalize("AA", choices=(1, 1)) == Address(-2, -1)


def test_children_of_negative_rows_use_bits():
    assert apply_move(Address(-1, 0), "a", (1,)) == Address(0, 1)
    assert apply_move(Address(-1, 0), "a", (0,)) == Address(0, 0)
    assert apply_move(Address(-1, 0), "a", ()) is None


def test_parse_word():
    assert parse_word("a b B") == "abB"
    assert parse_word("ε") == ""
    with pytest.raises(ValueError):
        parse_word("abc")


def test_parse_address_and_inverse_word():
    assert parse_address("(2,-3)") == Address(2, -3)
    assert inverse_word("abB") == "bBA"


@given(words, choice_seqs)
def test_normalize_matches_interval_geometry(w, ch):
    got = normalize(w, ORIGIN, ch)
    assert (tuple(got) if got is not None else None) == interval_walk(w, ch)


@given(words, choice_seqs)
def test_defining_relation(u, ch):
    assert normalize(u + "abb", ORIGIN, ch) == normalize(u + "ba", ORIGIN, ch)


@given(words, choice_seqs, st.sampled_from(["bB", "Bb", "aA"]))
def test_cancellation(u, ch, pair):
    assert normalize(u + pair, ORIGIN, ch) == normalize(u, ORIGIN, ch)


@given(words)
def test_parent_then_child_returns_only_from_left_children(u):
    at = normalize(u)
    if at is None or at.level < 1:
        return
    back = normalize(u + "Aa")
    assert (back == at) == (at.offset % 2 == 0)


@given(st.integers(-6, 12), st.integers(-200, 200), st.lists(st.integers(0, 1), min_size=6, max_size=6).map(tuple))
def test_address_to_word_roundtrip(level, offset, ch):
    a = Address(level, offset)
    assert normalize(address_to_word(a, ch), ORIGIN, ch) == a


def test_inverse_word_undoes_when_every_climb_lands_from_a_left_child():
    rng = random.Random(7)
    checked = 0
    for _ in range(2000):
        w = "".join(rng.choice("ab") for _ in range(rng.randrange(12)))
        # words over a, b stay below the origin, so the inverse climbs back through left children only if
        # each 'a' was taken from an even offset; b-steps are undone exactly
        end = normalize(w)
        back = normalize(inverse_word(w), end)
        path_even = True
        at = ORIGIN
        for g in w:
            nxt = apply_move(at, g)
            if g == "a" and nxt.offset % 2:
                path_even = False
            at = nxt
        if path_even:
            checked += 1
            assert back == ORIGIN
    assert checked > 0


def test_offsets_past_64_bits_overflow():
    with pytest.raises(OverflowError):
        descend(Address(0, 1), 63)
    with pytest.raises(OverflowError):
        normalize("a" * 62 + "b" * 3, Address(0, 1 << 2))


@pytest.mark.parametrize("n", range(0, 21))
def test_support_sizes(n):
    assert len(support_un(n)) == (1 << n) - 1
    assert len(support_ln(n)) == 1 << (n + 1)


@pytest.mark.parametrize("n", range(1, 7))
def test_supports_match_their_words(n):
    expected = {normalize("a" * p + "b" * q) for p in range(n) for q in range(1 << p)}
    assert set(support_un(n)) == expected
    row = {normalize("a" * (n + 1) + "b" * q) for q in range(1 << (n + 1))}
    assert set(support_ln(n)) == row


def test_support_under_other_base():
    s = support_un(2, Address(3, 5))
    assert list(s) == [Address(3, 5), Address(4, 10), Address(4, 11)]
    assert support_ln(1, Address(-1, 0), (1, 0)).levels == [1]


def test_address_set_operations():
    s = AddressSet.from_addresses([Address(1, 2), Address(1, 3), Address(0, 0), Address(1, 3)])
    assert len(s) == 3
    assert s.runs == ((0, 0, 1), (1, 2, 4))
    assert Address(1, 3) in s and Address(1, 4) not in s
    assert s.levels == [0, 1]
    assert s.isdisjoint(AddressSet.from_addresses([Address(2, 0)]))
    assert not s.isdisjoint(support_un(1))


def test_negative_support_needs_choices():
    with pytest.raises(ValueError):
        support_un(3, Address(-2, 0))

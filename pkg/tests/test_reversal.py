import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdakit import fixtures
from pdakit.colored import decide_colors
from pdakit.core import all_strings
from pdakit.h3 import MalformedInput, h3_oracle, triples
from pdakit.normalize import is_ideal_shape, regression, to_ideal_shape
from pdakit.reversal import (
    certify, default_color_map, make_stack_emptying, reverse, reverse_input, reverse_pair,
)


@pytest.fixture(scope="module")
def h3_pair():
    m = fixtures.colored_h3()
    return m, reverse(make_stack_emptying(m))


@pytest.mark.parametrize("word, expected", [
    ("01#10#11", "11#01#10"),
    ("##", "##"),
    ("0#1#", "#1#0"),
])
def test_reverse_input(word, expected):
    assert reverse_input(word) == expected


def test_reverse_input_needs_two_hashes():
    for bad in ("", "0#1", "0#1#0#"):
        with pytest.raises(MalformedInput):
            reverse_input(bad)


def test_color_map():
    assert reverse_pair((1, 3)) == (1, 3)
    assert reverse_pair((1, 2)) == (2, 3)
    cmap = default_color_map(["011", "00111", "0111"])
    assert cmap == {"011": "00111", "00111": "011", "0111": "0111"}
    assert all(cmap[cmap[c]] == c for c in cmap)
    assert default_color_map(["red"]) == {"red": "red"}


def test_examples(h3_pair):
    m, rev = h3_pair
    assert decide_colors(m, "01#10#11").colors == {"011"}
    assert decide_colors(rev, "11#01#10").colors == {"00111"}
    assert decide_colors(rev, "##").colors == {"011", "00111", "0111"}


def test_certificates_on_short_parts(h3_pair):
    m, rev = h3_pair
    certs = certify(m, rev, triples(2))
    assert len(certs) == 343 and all(c.matched for c in certs)


def test_reversed_machine_computes_h3_backwards(h3_pair):
    _, rev = h3_pair
    # reversal of h3 is h3 itself up to the color map
    cmap = default_color_map(rev.colors)
    for w in triples(1):
        assert decide_colors(rev, w).colors == {cmap[c] for c in h3_oracle(reverse_input(w))}


def test_stack_emptying_keeps_colors():
    for m in (fixtures.colored_h3(), fixtures.palindrome_matcher(), fixtures.push_only(),
              fixtures.always_rejecting()):
        se = make_stack_emptying(m)
        assert regression(m, se, all_strings(m.input_alphabet, 4)) == []


def test_stack_emptying_leaves_ideal_machines_alone():
    ideal, _ = to_ideal_shape(fixtures.palindrome_matcher())
    assert make_stack_emptying(ideal) is ideal


def test_push_only_machine_is_drained():
    se = make_stack_emptying(fixtures.push_only())
    assert "drain" in se.states
    assert decide_colors(se, "0101").colors == {"c"}


def test_double_reversal(h3_pair):
    m, rev = h3_pair
    back = reverse(make_stack_emptying(rev))
    for w in triples(1):
        assert decide_colors(back, w).colors == decide_colors(m, w).colors


def test_reversal_of_ideal_machine():
    ideal, _ = to_ideal_shape(fixtures.colored_h3())
    rev = reverse(make_stack_emptying(ideal))
    assert all(c.matched for c in certify(ideal, rev, triples(1)))
    assert not is_ideal_shape(rev, probe_len=2)[0]


parts = st.text(alphabet="01", max_size=3)


@settings(max_examples=50, deadline=None)
@given(parts, parts, parts)
def test_reverse_input_is_an_involution(x1, x2, x3):
    w = f"{x1}#{x2}#{x3}"
    assert reverse_input(reverse_input(w)) == w


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_random_machines_reverse(seed):
    m = fixtures.random_colored(seed)
    rev = reverse(make_stack_emptying(m))
    for w in all_strings(("0", "1"), 4):
        assert decide_colors(rev, w[::-1]).colors == decide_colors(m, w).colors

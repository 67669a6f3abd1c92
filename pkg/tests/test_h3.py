import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdakit.core import refines
from pdakit.h3 import (
    H3_VALUES, MalformedInput, TripleInput, build_h3_machine, h3_oracle, in_L, in_L3,
    oracle_table, substring_fixture, triples,
)


@pytest.mark.parametrize("word, expected", [
    ("01#10#01", {"011", "00111"}),
    ("0#1#0", {"0111"}),
    ("0#0#0", set(H3_VALUES)),
    ("##", set(H3_VALUES)),
    ("0#1#1", {"00111"}),
    ("01#00#11", set()),
    ("abc", set()),
    ("010", set()),
    ("0#1#0#1", set()),
])
def test_oracle(word, expected):
    assert h3_oracle(word) == expected


def test_languages():
    assert in_L("##") and in_L("01#1#") and not in_L("0#1") and not in_L("0#2#1")
    assert in_L3("0#0#1") and not in_L3("0#1#11")


def test_triple_input():
    t = TripleInput.parse("01#1#")
    assert t.parts == ("01", "1", "") and t.raw == "01#1#"
    with pytest.raises(MalformedInput):
        TripleInput.parse("0#1")
    with pytest.raises(MalformedInput):
        TripleInput("0", "2", "")


def test_triples_count():
    assert len(list(triples(3))) == 15 ** 3
    assert len(list(triples(0))) == 1


def test_machine_shape():
    m = build_h3_machine()
    assert m.input_alphabet == ("0", "1", "#")
    assert m.output_alphabet == ("0", "1")
    assert len([q for q in m.states if q.startswith("q") and "^" in q]) == 9


def test_oracle_table_domain():
    table = oracle_table(triples(1))
    assert len(table) == sum(1 for w in triples(1) if h3_oracle(w))
    assert table["0#0#0"] == set(H3_VALUES)


def test_substring_fixture():
    f, g = substring_fixture(6)
    assert f["11#010"] == {"0", "1", "01", "10"}
    assert g["11#010"] == {"0"}
    assert "1#" not in f
    assert refines(g, f)[0]
    with pytest.raises(ValueError):
        substring_fixture(13)


parts = st.text(alphabet="01", max_size=4)


@settings(max_examples=200, deadline=None)
@given(parts, parts, parts)
def test_oracle_pairs(x1, x2, x3):
    out = h3_oracle(f"{x1}#{x2}#{x3}")
    assert ("011" in out) == (x1[::-1] == x2)
    assert ("00111" in out) == (x2[::-1] == x3)
    assert ("0111" in out) == (x1[::-1] == x3)


@settings(max_examples=100, deadline=None)
@given(parts, parts, parts)
def test_oracle_is_symmetric_under_reversal(x1, x2, x3):
    # reversing the string maps pair (i, j) to (4 - j, 4 - i)
    swap = {"011": "00111", "00111": "011", "0111": "0111"}
    fwd = h3_oracle(f"{x1}#{x2}#{x3}")
    back = h3_oracle(f"{x3[::-1]}#{x2[::-1]}#{x1[::-1]}")
    assert back == {swap[v] for v in fwd}

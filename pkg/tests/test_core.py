import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pdakit import fixtures
from pdakit.core import (
    CENT, DOLLAR, LAMBDA, PDA, Z0, FunctionTable, TerminationViolation, Transition,
    all_strings, check_k_valued, check_unambiguous, enumerate_outputs, enumerate_paths,
    refines, tabulate, tabulate_inputs, validate,
)
from pdakit.h3 import build_h3_machine, h3_oracle, substring_fixture, triples


@pytest.fixture(scope="module")
def h3():
    return build_h3_machine()


def small_pda(transitions, states=("q", "acc", "rej"), gamma=(Z0, "a")):
    return PDA(states=states, input_alphabet=("0", "1"), stack_alphabet=gamma,
               transitions=tuple(transitions), initial=states[0],
               accepting=("acc",), rejecting=("rej",))


def test_h3_machine_is_valid(h3):
    assert validate(h3) == []


def test_popping_z0_without_restoring_it_is_diagnosed():
    m = small_pda([Transition("q", CENT, Z0, "q", ("a",))])
    codes = [d.code for d in validate(m)]
    assert codes == ["z0-preservation"]


def test_other_diagnostics():
    m = PDA(states=("q", "acc"), input_alphabet=("0",), stack_alphabet=(Z0,),
            transitions=(Transition("acc", "0", Z0, "nowhere", (Z0,)),
                         Transition("q", "x", Z0, "acc", (Z0,))),
            initial="q", accepting=("acc",), rejecting=("acc",))
    codes = {d.code for d in validate(m)}
    assert {"halting-overlap", "unknown-state", "alphabet", "halting-source"} <= codes


def test_three_accepting_paths_on_palindromic_triple(h3):
    paths = enumerate_paths(h3, "0#0#0", 200)
    accepting = [p for p in paths if p.accepted]
    assert len(accepting) == 3
    assert all(p.halted for p in paths)


def test_single_forced_rejecting_run():
    m = fixtures.always_rejecting()
    paths = enumerate_paths(m, "0101", 10)
    assert len(paths) == 1 and not paths[0].accepted


def test_lambda_self_loop_violates_termination():
    with pytest.raises(TerminationViolation) as info:
        enumerate_paths(fixtures.lambda_loop(), "0", 50)
    assert info.value.step_bound == 50
    with pytest.raises(TerminationViolation):
        enumerate_outputs(fixtures.lambda_loop(), "0", 50)


@pytest.mark.parametrize("word, expected", [
    ("01#10#01", {"011", "00111"}),
    ("0#1#0", {"0111"}),
    ("010", set()),
])
def test_outputs(h3, word, expected):
    assert enumerate_outputs(h3, word, 400) == expected


def test_paths_are_replayable(h3):
    for p in enumerate_paths(h3, "01#1#10"):
        for before, t, after in zip(p.configurations, p.moves, p.configurations[1:]):
            assert t.source == before.state and t.target == after.state
            assert after.stack == t.push + before.stack[1:]
            assert after.emitted == before.emitted + t.emit
            assert after.head == before.head + (0 if t.read == LAMBDA else 1)


def test_tabulate_examples(h3):
    assert "##" in tabulate(h3, 2)
    assert len(tabulate(fixtures.always_rejecting(), 3)) == 0
    assert len(tabulate(h3, 0)) == 0


def test_tabulate_matches_oracle_on_short_inputs(h3):
    table = tabulate(h3, 5)
    for w in all_strings(("0", "1", "#"), 5):
        assert table[w] == h3_oracle(w)


def test_k_valued(h3):
    table = tabulate_inputs(h3, triples(2))
    assert check_k_valued(table, 3) == (True, [])
    ok, witnesses = check_k_valued(table, 2)
    assert not ok and "0#0#0" in witnesses
    assert check_k_valued(FunctionTable({}, 0), 1) == (True, [])


def test_unambiguous(h3):
    assert check_unambiguous(h3, triples(2))[0]
    ok, witnesses = check_unambiguous(fixtures.duplicated_branch(), ["0"])
    assert not ok and witnesses == [("0", "0")]
    assert check_unambiguous(fixtures.always_rejecting(), ["0", "01"]) == (True, [])


def test_refines():
    f, g = substring_fixture(6)
    assert refines(g, f)[0]
    assert refines(f, f)[0]
    missing = dict(f.entries)
    key = next(iter(missing))
    del missing[key]
    ok, witnesses = refines(FunctionTable(missing, 6), f)
    assert not ok and ("domain", key) in witnesses
    with pytest.raises(ValueError):
        refines(FunctionTable({}, 5), f)


def test_function_table_rejects_empty_values():
    with pytest.raises(ValueError):
        FunctionTable({"0": set()}, 1)


words = st.text(alphabet="01#", max_size=6)


@settings(max_examples=150, deadline=None)
@given(words)
def test_outputs_agree_with_oracle(w):
    assert enumerate_outputs(build_h3_machine(), w) == h3_oracle(w)


@settings(max_examples=100, deadline=None)
@given(words)
def test_accepting_paths_end_in_accepting_states(w):
    m = build_h3_machine()
    outs = set()
    for p in enumerate_paths(m, w):
        assert p.configurations[-1].state in m.halting or not p.halted
        if p.accepted:
            outs.add(p.output)
    assert outs == enumerate_outputs(m, w)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 5))
def test_tabulate_is_monotone_in_length(seed, n):
    t = fixtures.random_transducer(seed)
    small, large = tabulate(t, n - 1), tabulate(t, n)
    for w in small.domain():
        assert large[w] == small[w]


def test_all_strings_counts():
    assert len(list(all_strings(("0", "1"), 3))) == 15
    assert list(all_strings(("0", "1"), 1, 1)) == ["0", "1"]


def test_dollar_is_read_once():
    m = small_pda([
        Transition("q", CENT, Z0, "q", (Z0,)),
        Transition("q", DOLLAR, Z0, "p", (Z0,)),
        Transition("p", DOLLAR, Z0, "acc", (Z0,)),
        Transition("p", LAMBDA, Z0, "rej", (Z0,)),
    ], states=("q", "p", "acc", "rej"))
    assert enumerate_outputs(m, "") == set()

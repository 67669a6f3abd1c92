"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Every comparison is exact.  The only tolerances are the wall-clock
limits below.
"""

import contextlib
import json
import time

import pytest

from pdakit import fileformat, fixtures
from pdakit import normalize as N
from pdakit.analysis import PathAssignment, check_no_repeat, compute_D
from pdakit.cli import main
from pdakit.colored import enumerate_colors, from_transducer
from pdakit.core import (
    all_strings, check_k_valued, check_unambiguous, enumerate_outputs,
    tabulate_inputs,
)
from pdakit.h3 import H3_VALUES, build_h3_machine, oracle_table, triples
from pdakit.reversal import certify, reverse

from reference_interpreter import valid_outputs

ORACLE_SECONDS = 60
PIPELINE_SECONDS = 120
REVERSAL_SECONDS = 30
H3_ALPHABET = ("0", "1", "#")


@pytest.fixture
def verdict(capsys):
    @contextlib.contextmanager
    def line(number, what):
        start = time.perf_counter()
        ok = False
        try:
            yield
            ok = True
        finally:
            took = time.perf_counter() - start
            with capsys.disabled():
                print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {what} ({took:.2f}s)")
    return line


@pytest.fixture(scope="module")
def h3():
    return build_h3_machine()


@pytest.fixture(scope="module")
def corpus():
    # every string up to length 11: all triples with parts <= 3 and every
    # malformed string of the same lengths, plus a few off-alphabet ones
    return list(all_strings(H3_ALPHABET, 11)) + ["a", "0#a#1", "01#10#01x", "0#1#0#1"]


def test_oracle_equivalence(verdict, h3, corpus):
    with verdict(1, "machine table equals oracle table"):
        start = time.perf_counter()
        table = tabulate_inputs(h3, corpus, length_bound=11)
        assert table == oracle_table(corpus, 11)
        assert set(triples(3)) <= set(corpus)
        assert time.perf_counter() - start < ORACLE_SECONDS


def test_unambiguity(verdict, h3, corpus):
    with verdict(2, "one accepting path per produced value"):
        ok, witnesses = check_unambiguous(h3, corpus)
        assert ok, witnesses[:5]


def test_valuedness(verdict, h3):
    with verdict(3, "3-valued, not 2-valued; witnesses are x#x#x with x a palindrome"):
        table = tabulate_inputs(h3, triples(3))
        assert check_k_valued(table, 3) == (True, [])
        ok, witnesses = check_k_valued(table, 2)
        assert not ok
        for w in witnesses:
            x1, x2, x3 = w.split("#")
            assert x1 == x2 == x3 == x1[::-1], w
        assert "##" in witnesses and len(witnesses) == 1 + 2 + 2 + 4


def test_compilation_preserves_outputs(verdict, h3):
    with verdict(4, "compiled colors equal transducer outputs up to length 8"):
        colored = from_transducer(h3, H3_VALUES)
        for w in all_strings(H3_ALPHABET, 8):
            assert enumerate_colors(colored, w).colors == enumerate_outputs(h3, w), w


def test_ideal_shape_pipeline(verdict):
    with verdict(5, "pipeline output is ideal and color-equivalent up to length 6"):
        start = time.perf_counter()
        machines = fixtures.ideal_corpus()
        assert len(machines) >= 5
        for name, m in machines.items():
            out, _ = N.to_ideal_shape(m)
            ok, conditions = N.is_ideal_shape(out, probe_len=6)
            assert ok and len(conditions) == 6, (name, conditions)
            words = list(all_strings(m.input_alphabet, 6))
            assert N.regression(m, out, words) == [], name
        assert time.perf_counter() - start < PIPELINE_SECONDS


def test_pass_postconditions(verdict):
    scans = [("(4)", N.lambda_pops), ("(5)", N.unit_replacements), ("(6)", N.lambda_loops),
             ("(7)", N.lambda_reads), ("(8)", N.long_pushes)]
    with verdict(6, "structural scans are empty after passes 4 to 8"):
        for name, m in fixtures.ideal_corpus().items():
            _, trace = N.to_ideal_shape(m)
            for prefix, scan in scans:
                after = next(s.machine for s in trace.steps if s.name.startswith(prefix))
                assert scan(after) == [], (name, prefix)


def test_reversal_correspondence(verdict):
    with verdict(7, "(i,j) forward iff (4-j,4-i) on the reversed input"):
        start = time.perf_counter()
        m = fixtures.colored_h3()
        certs = certify(m, reverse(m), triples(2))
        assert len(certs) == 7 ** 3
        assert [c.input for c in certs if not c.matched] == []
        assert time.perf_counter() - start < REVERSAL_SECONDS


def test_d_sets(verdict):
    with verdict(8, "D(1,2) = D(2,3) = {0,1}^n for n = 1..3"):
        m = fixtures.colored_h3()
        for n in (1, 2, 3):
            full = set(all_strings(("0", "1"), n, n))
            d12, d23 = compute_D(m, n, (1, 2)), compute_D(m, n, (2, 3))
            assert d12 == d23 == full
            assert d12 | d23 == full


def test_stack_history_checks(verdict):
    with verdict(9, "no repeats on the palindrome matcher, all pairs on the idle scanner"):
        pal = PathAssignment(fixtures.palindrome_matcher())
        idle = PathAssignment(fixtures.idle_scanner())
        for n in (1, 2, 3):
            for x in all_strings(("0", "1"), n, n):
                h = pal.history(x, x, "pal")
                assert check_no_repeat(h, 0, n) == []
                assert check_no_repeat(h, n + 1, 2 * n + 1) == []
                flat = idle.history(x, x, "c")
                everything = [(i, j) for i in range(len(flat)) for j in range(i + 1, len(flat))]
                assert check_no_repeat(flat, 0, len(flat) - 1) == everything


def test_simulator_cross_validation(verdict):
    with verdict(10, "simulator agrees with the reference interpreter on 50 machines"):
        checked = defined = 0
        for seed in range(50):
            t = fixtures.random_transducer(seed)
            assert len(t.states) <= 4 and len(t.stack_alphabet) - 1 <= 3
            assert len(t.output_alphabet) <= 2
            d = fileformat.to_dict(t)
            for w in all_strings(t.input_alphabet, 5):
                depth = 64 * (len(w) + 2)
                expected = valid_outputs(d, w, depth)
                assert enumerate_outputs(t, w) == expected, (seed, w)
                checked += 1
                defined += bool(expected)
        assert checked == 50 * 63 and defined > 500


def test_round_trip_and_stable_reports(verdict, tmp_path):
    with verdict(11, "parse/serialize round-trip and byte-stable reports"):
        for name, m in fixtures.all_fixtures().items():
            text = fileformat.serialize(m)
            assert fileformat.parse(text) == m, name
            assert fileformat.serialize(fileformat.parse(text)) == text, name
        src = tmp_path / "colored-h3.json"
        fileformat.dump(fixtures.colored_h3(), src)
        reports = []
        for k in range(2):
            out = tmp_path / f"report{k}.json"
            assert main(["--quiet", "experiment", str(src), "--n", "2", "--suite", "lemmas",
                         "--report", str(out)]) == 0
            reports.append(out.read_bytes())
        assert reports[0] == reports[1]
        assert json.loads(reports[0])["payload"]["n"] == 2

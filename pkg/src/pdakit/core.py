"""Pushdown transducers: machine model, nondeterministic simulation and
multi-valued function semantics.

A machine reads ``¢ input $`` left to right.  Transitions may be
lambda-moves (``read == LAMBDA``), which leave the head in place.  The
stack is a tuple written top-first with the bottom marker ``Z0`` last.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

CENT = "¢"
DOLLAR = "$"
LAMBDA = ""
Z0 = "Z0"

STEP_FACTOR = 64

ACCEPTED = "accepted"
REJECTED = "rejected"


class TerminationViolation(Exception):
    """Some computation path is still running when the step bound runs out."""

    def __init__(self, input: str, step_bound: int, partial=None):
        self.input = input
        self.step_bound = step_bound
        self.partial = partial
        super().__init__(
            f"computation on {input!r} exceeds {step_bound} steps without halting"
        )


def default_bound(input: str) -> int:
    return STEP_FACTOR * (len(input) + 2)


@dataclass(frozen=True, order=True)
class Transition:
    source: str
    read: str
    pop: str
    target: str
    push: tuple[str, ...] = ()
    emit: str = ""

    def __post_init__(self):
        if not isinstance(self.push, tuple):
            object.__setattr__(self, "push", tuple(self.push))

    @property
    def is_lambda(self) -> bool:
        return self.read == LAMBDA

    def __str__(self):
        read = self.read or "λ"
        push = " ".join(self.push) or "λ"
        out = f" / {self.emit}" if self.emit else ""
        return f"δ({self.source}, {read}, {self.pop}) ∋ ({self.target}, {push}{out})"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    transition: Transition | None = None

    def __str__(self):
        if self.transition is None:
            return f"[{self.code}] {self.message}"
        return f"[{self.code}] {self.message}: {self.transition}"


@dataclass(frozen=True)
class PDA:
    """Common part of transducers and colored automata.

    Alphabets and state sets are kept as tuples in declaration order so
    that serialization and exploration order are reproducible.
    """

    states: tuple[str, ...]
    input_alphabet: tuple[str, ...]
    stack_alphabet: tuple[str, ...]
    transitions: tuple[Transition, ...]
    initial: str
    accepting: tuple[str, ...]
    rejecting: tuple[str, ...]

    def __post_init__(self):
        for name in ("states", "input_alphabet", "stack_alphabet",
                     "transitions", "accepting", "rejecting"):
            value = getattr(self, name)
            if not isinstance(value, tuple):
                object.__setattr__(self, name, tuple(value))

    @cached_property
    def halting(self) -> frozenset[str]:
        return frozenset(self.accepting) | frozenset(self.rejecting)

    @cached_property
    def moves(self) -> Mapping[tuple[str, str], tuple[Transition, ...]]:
        """(state, popped symbol) -> transitions in declaration order."""
        table: dict[tuple[str, str], list[Transition]] = defaultdict(list)
        for t in self.transitions:
            table[t.source, t.pop].append(t)
        return {k: tuple(v) for k, v in table.items()}

    def size(self) -> tuple[int, int, int]:
        return len(self.states), len(self.stack_alphabet), len(self.transitions)


@dataclass(frozen=True)
class Transducer(PDA):
    output_alphabet: tuple[str, ...] = ()

    def __post_init__(self):
        super().__post_init__()
        if not isinstance(self.output_alphabet, tuple):
            object.__setattr__(self, "output_alphabet", tuple(self.output_alphabet))


def validate(m: PDA) -> list[Diagnostic]:
    """Check the well-formedness invariants of a machine.

    Returns one diagnostic per violation; an empty list means the machine
    is well formed.
    """
    out: list[Diagnostic] = []
    states = set(m.states)
    sigma = set(m.input_alphabet)
    gamma = set(m.stack_alphabet)
    theta = set(getattr(m, "output_alphabet", ()))
    emits = isinstance(m, Transducer)

    if set(m.accepting) & set(m.rejecting):
        out.append(Diagnostic("halting-overlap",
                              f"states both accepting and rejecting: "
                              f"{sorted(set(m.accepting) & set(m.rejecting))}"))
    if m.initial not in states:
        out.append(Diagnostic("unknown-state", f"initial state {m.initial!r} not declared"))
    for q in (*m.accepting, *m.rejecting):
        if q not in states:
            out.append(Diagnostic("unknown-state", f"halting state {q!r} not declared"))
    if Z0 not in gamma:
        out.append(Diagnostic("alphabet", "stack alphabet must contain Z0"))
    for a in m.input_alphabet:
        if a in (CENT, DOLLAR, LAMBDA) or len(a) != 1:
            out.append(Diagnostic("alphabet", f"illegal input symbol {a!r}"))
    for a in theta:
        if len(a) != 1:
            out.append(Diagnostic("alphabet", f"output symbols must be single characters: {a!r}"))

    for t in m.transitions:
        if t.source not in states or t.target not in states:
            out.append(Diagnostic("unknown-state", "transition mentions an undeclared state", t))
        if t.source in m.halting:
            out.append(Diagnostic("halting-source", "transition leaves a halting state", t))
        if t.read not in sigma and t.read not in (CENT, DOLLAR, LAMBDA):
            out.append(Diagnostic("alphabet", f"read symbol {t.read!r} not in input alphabet", t))
        if t.pop not in gamma or any(s not in gamma for s in t.push):
            out.append(Diagnostic("alphabet", "stack symbol not in stack alphabet", t))
        if emits:
            if any(c not in theta for c in t.emit):
                out.append(Diagnostic("alphabet", "emitted symbol not in output alphabet", t))
        elif t.emit:
            out.append(Diagnostic("alphabet", "machine without output tape emits output", t))
        if t.pop == Z0:
            if not t.push or t.push[-1] != Z0 or Z0 in t.push[:-1]:
                out.append(Diagnostic("z0-preservation",
                                      "popping Z0 must push a string ending in Z0", t))
        elif Z0 in t.push:
            out.append(Diagnostic("z0-preservation", "Z0 pushed above the bottom", t))
    return out


# --------------------------------------------------------------------------
# configurations and paths

@dataclass(frozen=True)
class Configuration:
    state: str
    head: int
    stack: tuple[str, ...]
    emitted: str = ""

    def __post_init__(self):
        if not self.stack or self.stack[-1] != Z0 or self.stack.count(Z0) != 1:
            raise ValueError(f"malformed stack {self.stack!r}")


@dataclass(frozen=True)
class ComputationPath:
    """A maximal run: configurations ``c_0 .. c_k`` and the ``k`` moves
    between them.  ``halted`` is False for runs that got stuck (no move
    applies in a non-halting state); such runs count as rejecting."""

    input: str
    configurations: tuple[Configuration, ...]
    moves: tuple[Transition, ...]
    verdict: str
    halted: bool = True

    @property
    def output(self) -> str:
        return self.configurations[-1].emitted

    @property
    def accepted(self) -> bool:
        return self.verdict == ACCEPTED

    @property
    def steps(self) -> tuple[tuple[Configuration, Transition | None], ...]:
        return tuple(itertools.zip_longest(self.configurations, self.moves))

    def __len__(self):
        return len(self.moves)


def tape_of(input: str) -> tuple[str, ...]:
    if CENT in input or DOLLAR in input:
        raise ValueError("endmarkers are implicit and may not occur in the input")
    return (CENT, *input, DOLLAR)


def initial_configuration(m: PDA) -> Configuration:
    return Configuration(m.initial, 0, (Z0,), "")


def _successors(m: PDA, tape: Sequence[str], state: str, head: int,
                stack: tuple[str, ...]) -> Iterator[tuple[Transition, int, tuple[str, ...]]]:
    """Applicable moves from a raw configuration, in declaration order."""
    here = tape[head] if head < len(tape) else None
    for t in m.moves.get((state, stack[0]), ()):
        if t.read == LAMBDA:
            yield t, head, t.push + stack[1:]
        elif t.read == here:
            yield t, head + 1, t.push + stack[1:]


def successors(m: PDA, input: str, c: Configuration) -> list[tuple[Transition, Configuration]]:
    tape = tape_of(input)
    return [
        (t, Configuration(t.target, head, stack, c.emitted + t.emit))
        for t, head, stack in _successors(m, tape, c.state, c.head, c.stack)
    ]


def enumerate_paths(m: PDA, input: str, step_bound: int | None = None,
                    max_paths: int = 200_000) -> tuple[ComputationPath, ...]:
    """All maximal computation paths on ``input``.

    Paths are explored breadth-first with moves tried in declaration
    order, so the result is ordered by length and then lexicographically
    by the sequence of transition indices.  The first accepting path in
    this order is the canonical one used by the analysis tools.
    """
    bound = default_bound(input) if step_bound is None else step_bound
    if bound < 1:
        raise ValueError("step_bound must be positive")
    tape = tape_of(input)
    c0 = initial_configuration(m)
    frontier = [((c0,), ())]
    done: list[ComputationPath] = []
    for step in range(bound + 1):
        nxt = []
        for configs, moves in frontier:
            c = configs[-1]
            if c.state in m.halting:
                verdict = ACCEPTED if c.state in m.accepting else REJECTED
                done.append(ComputationPath(input, configs, moves, verdict))
                continue
            succ = list(_successors(m, tape, c.state, c.head, c.stack))
            if not succ:
                done.append(ComputationPath(input, configs, moves, REJECTED, halted=False))
                continue
            if step == bound:
                raise TerminationViolation(input, bound,
                                           ComputationPath(input, configs, moves, REJECTED, False))
            for t, head, stack in succ:
                nc = Configuration(t.target, head, stack, c.emitted + t.emit)
                nxt.append((configs + (nc,), moves + (t,)))
        if len(nxt) > max_paths:
            raise RuntimeError(f"more than {max_paths} live paths on {input!r}")
        frontier = nxt
        if not frontier:
            break
    return tuple(done)


def enumerate_outputs(m: PDA, input: str, step_bound: int | None = None) -> frozenset[str]:
    """Valid outputs on ``input``: what accepting paths leave on the output tape.

    Works on the set of reachable configurations rather than on paths,
    so it stays polynomial for machines with heavy nondeterminism.
    """
    bound = default_bound(input) if step_bound is None else step_bound
    if bound < 1:
        raise ValueError("step_bound must be positive")
    tape = tape_of(input)
    frontier = {(m.initial, 0, (Z0,), "")}
    outputs: set[str] = set()
    for step in range(bound + 1):
        nxt = set()
        for state, head, stack, emitted in frontier:
            if state in m.halting:
                if state in m.accepting:
                    outputs.add(emitted)
                continue
            succ = list(_successors(m, tape, state, head, stack))
            if succ and step == bound:
                raise TerminationViolation(input, bound)
            for t, h, s in succ:
                nxt.add((t.target, h, s, emitted + t.emit))
        frontier = nxt
        if not frontier:
            break
    return frozenset(outputs)


# --------------------------------------------------------------------------
# function tables

@dataclass(frozen=True, eq=True)
class FunctionTable:
    """Finite restriction of a multi-valued partial function.

    Undefined inputs are absent from ``entries``; present keys always map
    to a nonempty set.
    """

    entries: Mapping[str, frozenset[str]]
    length_bound: int

    __hash__ = None  # type: ignore[assignment]

    def __post_init__(self):
        clean = {}
        for k in sorted(self.entries, key=lambda s: (len(s), s)):
            v = frozenset(self.entries[k])
            if len(k) > self.length_bound:
                raise ValueError(f"key {k!r} longer than length bound {self.length_bound}")
            if not v:
                raise ValueError(f"empty value set for {k!r}; leave undefined inputs out")
            clean[k] = v
        object.__setattr__(self, "entries", clean)

    def __getitem__(self, key: str) -> frozenset[str]:
        return self.entries.get(key, frozenset())

    def __contains__(self, key: str) -> bool:
        return key in self.entries

    def __len__(self):
        return len(self.entries)

    def domain(self) -> frozenset[str]:
        return frozenset(self.entries)

    @classmethod
    def from_function(cls, fn, inputs: Iterable[str], length_bound: int | None = None):
        inputs = list(inputs)
        bound = max((len(w) for w in inputs), default=0) if length_bound is None else length_bound
        return cls({w: fn(w) for w in inputs if fn(w)}, bound)


def all_strings(alphabet: Iterable[str], max_len: int, min_len: int = 0) -> Iterator[str]:
    alphabet = tuple(alphabet)
    for n in range(min_len, max_len + 1):
        for tup in itertools.product(alphabet, repeat=n):
            yield "".join(tup)


def tabulate(t: PDA, max_len: int, step_bound: int | None = None) -> FunctionTable:
    if max_len < 0:
        raise ValueError("max_len must be nonnegative")
    return tabulate_inputs(t, all_strings(t.input_alphabet, max_len), step_bound, max_len)


def tabulate_inputs(t: PDA, inputs: Iterable[str], step_bound: int | None = None,
                    length_bound: int | None = None) -> FunctionTable:
    inputs = list(inputs)
    bound = max((len(w) for w in inputs), default=0) if length_bound is None else length_bound
    entries = {}
    for w in inputs:
        out = enumerate_outputs(t, w, step_bound)
        if out:
            entries[w] = out
    return FunctionTable(entries, bound)


def check_k_valued(table: FunctionTable, k: int) -> tuple[bool, list[str]]:
    if k < 1:
        raise ValueError("k must be positive")
    bad = [w for w, v in table.entries.items() if len(v) > k]
    return not bad, bad


def check_unambiguous(t: PDA, inputs: Iterable[str],
                      step_bound: int | None = None) -> tuple[bool, list[tuple[str, str]]]:
    """Every produced value must come from exactly one accepting path."""
    witnesses = []
    for w in inputs:
        counts: dict[str, int] = defaultdict(int)
        for p in enumerate_paths(t, w, step_bound):
            if p.accepted:
                counts[p.output] += 1
        witnesses.extend((w, y) for y, n in sorted(counts.items()) if n > 1)
    return not witnesses, witnesses


def refines(g: FunctionTable, f: FunctionTable) -> tuple[bool, list[tuple[str, str]]]:
    """Whether ``g`` refines ``f``: equal domains and ``g(x) ⊆ f(x)``.

    Witnesses are ``("domain", x)`` for a key present in only one table and
    ``("value", x)`` where g has a value outside f.
    """
    if g.length_bound != f.length_bound:
        raise ValueError("tables cover different length bounds")
    witnesses = [("domain", x) for x in sorted(g.domain() ^ f.domain(), key=lambda s: (len(s), s))]
    for x, ys in g.entries.items():
        if x in f and not ys <= f[x]:
            witnesses.append(("value", x))
    return not witnesses, witnesses

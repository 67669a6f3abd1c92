"""Colored automata: npda's without output tape whose stack alphabet
(minus Z0) is partitioned into colors.

The output of a colored automaton on ``w`` is the set of colors ``c`` for
which some accepting path only ever holds symbols of color ``c`` (plus
Z0).  Z0 carries every color, so an accepting path that never pushes
anything counts for all colors.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .core import (
    LAMBDA, PDA, Z0, ComputationPath, Diagnostic,
    TerminationViolation, Transducer, Transition, _successors, default_bound,
    tape_of,
)

MIXED = "mixed"
BOTTOM_ONLY = "bottom-only"

# I3 pair <-> output-value naming used throughout the h3 material
I3 = ((1, 2), (2, 3), (1, 3))


def pair_value(pair: tuple[int, int]) -> str:
    i, j = pair
    return "0" * i + "1" * j


def value_pair(value: str) -> tuple[int, int]:
    i = len(value) - len(value.lstrip("0"))
    j = len(value) - i
    if value != "0" * i + "1" * j:
        raise ValueError(f"{value!r} is not of the form 0^i1^j")
    return i, j


class CompilationError(ValueError):
    pass


@dataclass(frozen=True)
class ColoredAutomaton(PDA):
    colors: tuple[str, ...] = ()
    partition: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        super().__post_init__()
        if not isinstance(self.colors, tuple):
            object.__setattr__(self, "colors", tuple(self.colors))
        part = self.partition
        if isinstance(part, Mapping):
            part = tuple(part.items())
        object.__setattr__(self, "partition", tuple(tuple(p) for p in part))

    @cached_property
    def color_map(self) -> Mapping[str, str]:
        return dict(self.partition)

    def color_of(self, symbol: str) -> str | None:
        if symbol == Z0:
            return None
        return self.color_map[symbol]

    def symbols_of(self, color: str) -> frozenset[str]:
        """Stack symbols usable on a path of the given color (Z0 included)."""
        return frozenset(s for s, c in self.partition if c == color) | {Z0}


@dataclass(frozen=True)
class ColorVerdict:
    input: str
    colors: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "colors", frozenset(self.colors))


def validate_partition(m: ColoredAutomaton) -> list[Diagnostic]:
    out = []
    seen: dict[str, str] = {}
    for sym, color in m.partition:
        if sym == Z0:
            out.append(Diagnostic("partition", "Z0 carries every color and may not be partitioned"))
            continue
        if sym in seen and seen[sym] != color:
            out.append(Diagnostic("partition",
                                  f"symbol {sym!r} assigned to two colors {seen[sym]!r} and {color!r}"))
        seen.setdefault(sym, color)
        if color not in m.colors:
            out.append(Diagnostic("partition", f"symbol {sym!r} has undeclared color {color!r}"))
        if sym not in m.stack_alphabet:
            out.append(Diagnostic("partition", f"partitioned symbol {sym!r} not in stack alphabet"))
    for sym in m.stack_alphabet:
        if sym != Z0 and sym not in seen:
            out.append(Diagnostic("partition", f"stack symbol {sym!r} has no color"))
    return out


def _touch(tag, m: ColoredAutomaton, symbols: Iterable[str]):
    # tag: None (nothing colored seen yet), a color, or MIXED
    for s in symbols:
        if tag == MIXED:
            return tag
        if s == Z0:
            continue
        c = m.color_map[s]
        if tag is None:
            tag = c
        elif tag != c:
            return MIXED
    return tag


def path_color(p: ComputationPath, m: ColoredAutomaton) -> str:
    tag = None
    for c in p.configurations:
        tag = _touch(tag, m, c.stack)
    return BOTTOM_ONLY if tag is None else tag


def path_has_color(p: ComputationPath, m: ColoredAutomaton, color: str) -> bool:
    c = path_color(p, m)
    return c == color or c == BOTTOM_ONLY


def enumerate_colors(m: ColoredAutomaton, input: str,
                     step_bound: int | None = None) -> ColorVerdict:
    """Colors of accepting single-color paths, found by bounded simulation.

    Raises TerminationViolation when some run is still alive at the bound.
    """
    bound = default_bound(input) if step_bound is None else step_bound
    tape = tape_of(input)
    frontier = {(m.initial, 0, (Z0,), None)}
    colors: set[str] = set()
    for step in range(bound + 1):
        nxt = set()
        for state, head, stack, tag in frontier:
            if state in m.halting:
                if state in m.accepting and tag != MIXED:
                    colors.update(m.colors if tag is None else (tag,))
                continue
            succ = list(_successors(m, tape, state, head, stack))
            if succ and step == bound:
                raise TerminationViolation(input, bound)
            for t, h, s in succ:
                nxt.add((t.target, h, s, _touch(tag, m, t.push)))
        frontier = nxt
        if not frontier:
            break
    return ColorVerdict(input, frozenset(colors))


def _accepts_within(m: PDA, tape, allowed: frozenset[str] | None) -> bool:
    """Exact acceptance test restricted to stack symbols in ``allowed``.

    Earley-style saturation over items ``(p, A, i)``: "started in state p
    at tape position i with A on top".  For each item we collect the
    ``(r, j)`` at which A can be popped and whether an accepting state can
    be reached while A is still on the stack.  Independent of termination.
    """
    if m.initial in m.accepting:
        return True
    n = len(tape)
    index: dict[tuple[str, str], list[Transition]] = defaultdict(list)
    for t in m.transitions:
        if allowed is None or (t.pop in allowed and all(s in allowed for s in t.push)):
            index[t.source, t.pop].append(t)

    pops: dict[tuple, set] = defaultdict(set)
    acc: set[tuple] = set()
    waiters: dict[tuple, list] = defaultdict(list)
    demanded: set[tuple] = set()
    agenda: deque = deque()
    accepting = frozenset(m.accepting)
    root = (m.initial, Z0, 0)

    def demand(key):
        if key in demanded:
            return
        demanded.add(key)
        p, a, i = key
        for t in index.get((p, a), ()):
            if t.read == LAMBDA:
                agenda.append((key, t, 0, t.target, i))
            elif i < n and tape[i] == t.read:
                agenda.append((key, t, 0, t.target, i + 1))

    def mark(key):
        stack = [key]
        while stack:
            k = stack.pop()
            if k in acc:
                continue
            acc.add(k)
            for parent, _t, _m in waiters[k]:
                stack.append(parent)

    demand(root)
    while agenda and root not in acc:
        key, t, idx, s, j = agenda.popleft()
        if idx == len(t.push):
            res = (s, j)
            if res not in pops[key]:
                pops[key].add(res)
                for parent, pt, pm in waiters[key]:
                    agenda.append((parent, pt, pm + 1, s, j))
            continue
        if s in accepting:
            mark(key)
            continue
        child = (s, t.push[idx], j)
        waiters[child].append((key, t, idx))
        demand(child)
        for r, j2 in list(pops[child]):
            agenda.append((key, t, idx + 1, r, j2))
        if child in acc:
            mark(key)
    return root in acc


def decide_colors(m: ColoredAutomaton, input: str) -> ColorVerdict:
    """Exact color output, computed without simulation.

    Agrees with :func:`enumerate_colors` on machines satisfying the
    termination condition, and is also defined for machines that do not
    (intermediate normalization stages, reversed machines).
    """
    tape = tape_of(input)
    found = {c for c in m.colors if _accepts_within(m, tape, m.symbols_of(c))}
    return ColorVerdict(input, frozenset(found))


def decide_accepts(m: PDA, input: str) -> bool:
    return _accepts_within(m, tape_of(input), None)


# --------------------------------------------------------------------------
# compilation of a transducer with finitely many outputs

def _tag(symbol: str, value: str) -> str:
    return f"{symbol}^{value}"


def _bottom(value: str) -> str:
    return f"⊥^{value}"


def _cstate(q: str, value: str, prefix: str) -> str:
    return f"({q},{value},{prefix or 'λ'})"


def from_transducer(t: Transducer, output_values: Iterable[str]) -> ColoredAutomaton:
    """Compile an output-tape machine into a colored automaton.

    Each color is an output value.  The compiled machine first guesses the
    value ``v`` (a lambda-move pushing the color-``v`` bottom marker ``⊥^v``),
    then simulates ``t`` with every stack symbol tagged by ``v`` and the
    emitted prefix kept in the finite control.  It accepts only where
    ``t`` accepts having emitted exactly ``v``; emissions that leave the
    prefixes of ``v`` lead to the rejecting sink.
    """
    values = tuple(dict.fromkeys(output_values))
    if not values:
        raise CompilationError("need at least one output value")
    for tr in t.transitions:
        if tr.emit and not any(tr.emit in v for v in values):
            raise CompilationError(f"emission {tr.emit!r} is not part of any output value: {tr}")

    init = "(init)"
    sink = "q'_rej"
    gamma = [Z0]
    partition = []
    for v in values:
        for s in (_bottom(v), *(_tag(a, v) for a in t.stack_alphabet if a != Z0)):
            gamma.append(s)
            partition.append((s, v))

    def mapped(word, v):
        return tuple(_bottom(v) if a == Z0 else _tag(a, v) for a in word)

    states = [init]
    accepting, rejecting = [], []
    seen = set()
    transitions = []
    queue = deque()

    def visit(q, v, prefix, kind=None):
        name = sink_name(v, prefix) if kind == "sink" else _cstate(q, v, prefix)
        if name not in seen:
            seen.add(name)
            states.append(name)
            if kind == "sink" or q in t.rejecting:
                rejecting.append(name)
            elif q in t.accepting:
                accepting.append(name)
            else:
                queue.append((q, v, prefix))
        return name

    def sink_name(v, prefix):
        return f"({sink},{v},{prefix or 'λ'})"

    for v in values:
        start = visit(t.initial, v, "")
        transitions.append(Transition(init, LAMBDA, Z0, start, (_bottom(v), Z0)))
    while queue:
        q, v, prefix = queue.popleft()
        here = _cstate(q, v, prefix)
        for tr in t.transitions:
            if tr.source != q:
                continue
            nxt = prefix + tr.emit
            if tr.target in t.accepting and nxt == v:
                target = visit(tr.target, v, v)
            elif tr.target in t.accepting or not v.startswith(nxt):
                target = visit(None, v, nxt, "sink")
            else:
                target = visit(tr.target, v, nxt)
            transitions.append(Transition(here, tr.read, mapped((tr.pop,), v)[0],
                                          target, mapped(tr.push, v)))
    return ColoredAutomaton(
        states=tuple(states), input_alphabet=t.input_alphabet,
        stack_alphabet=tuple(gamma), transitions=tuple(transitions),
        initial=init, accepting=tuple(accepting), rejecting=tuple(rejecting),
        colors=values, partition=tuple(partition),
    )


def color_table(m: ColoredAutomaton, inputs: Iterable[str], exact: bool = False,
                step_bound: int | None = None) -> dict[str, frozenset[str]]:
    fn = (lambda w: decide_colors(m, w)) if exact else (lambda w: enumerate_colors(m, w, step_bound))
    return {w: fn(w).colors for w in inputs}

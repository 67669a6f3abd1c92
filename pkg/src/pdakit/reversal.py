"""Reversed colored automata.

``reverse(m)`` runs the accepting paths of ``m`` backwards: on
``x3ᴿ#x2ᴿ#x1ᴿ`` it accepts with color ``(4-j, 4-i)`` exactly when ``m``
accepts ``x1#x2#x3`` with color ``(i, j)``.  The stack symbols are shared;
only their color names are relabeled.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .colored import I3, ColoredAutomaton, decide_colors, pair_value, value_pair
from .core import CENT, DOLLAR, LAMBDA, Z0, Transition
from .h3 import MalformedInput
from .normalize import _fresh, _rebuild, delay_halting, is_ideal_shape, unify_halting


def reverse_input(w: str) -> str:
    parts = w.split("#")
    if len(parts) != 3:
        raise MalformedInput(f"{w!r} does not contain exactly two '#'")
    return "#".join(p[::-1] for p in reversed(parts))


def reverse_pair(pair: tuple[int, int]) -> tuple[int, int]:
    i, j = pair
    return 4 - j, 4 - i


def default_color_map(colors: Iterable[str]) -> dict[str, str]:
    """``0^i1^j -> 0^(4-j)1^(4-i)`` when every color names an I3 pair,
    the identity otherwise."""
    colors = tuple(colors)
    names = {pair_value(p) for p in I3}
    if colors and all(c in names for c in colors):
        return {c: pair_value(reverse_pair(value_pair(c))) for c in colors}
    return {c: c for c in colors}


def make_stack_emptying(m: ColoredAutomaton) -> ColoredAutomaton:
    """A color-equivalent machine that accepts only after ``$`` with bare Z0.

    Machines already in ideal shape are returned unchanged.  Otherwise the
    halting states are unified and delayed to the ``$``-step, and every
    move into the accepting state goes to a drain state instead, which pops
    down to Z0 with lambda-moves and then accepts.
    """
    if is_ideal_shape(m, probe_len=3)[0]:
        return m
    m = delay_halting(unify_halting(m))
    acc = m.accepting[0]
    drain = _fresh("drain", set(m.states))
    ts = [dataclasses.replace(t, target=drain) if t.target == acc else t for t in m.transitions]
    for a in m.stack_alphabet:
        if a == Z0:
            ts.append(Transition(drain, LAMBDA, Z0, acc, (Z0,)))
        else:
            ts.append(Transition(drain, LAMBDA, a, drain, ()))
    states = [q for q in m.states if q not in m.halting] + [drain, *m.accepting, *m.rejecting]
    return _rebuild(m, ts, m.color_map.__getitem__, states=states)


_PHASES = ("pre", "mid", "post")


def _st(q: str, phase: str) -> str:
    return f"{q}|{phase}"


def reverse(m: ColoredAutomaton, color_map: Mapping[str, str] | None = None) -> ColoredAutomaton:
    """Backward simulation of the accepting paths of ``m``.

    ``m`` is first made stack-emptying with :func:`make_stack_emptying`.

    A forward move ``(p, a, A) -> (r, η)`` becomes a move from ``r`` to
    ``p`` that reads ``a`` (with ``¢`` and ``$`` swapped), pops ``η`` and
    pushes ``A``.  Pops of two or more symbols go through fresh
    intermediate states with lambda-moves.  A forward pop (empty ``η``)
    becomes a push of ``A`` over whatever symbol ``τ`` is on top,
    including Z0.  Phases ``pre``/``mid``/``post`` track whether the
    reversed run has read its ``¢`` and ``$``.
    """
    m = make_stack_emptying(m)
    cmap = dict(default_color_map(m.colors) if color_map is None else color_map)
    start = _fresh("start", {_st(q, p) for q in m.states for p in _PHASES})
    acc, rej = "accept", "reject"
    ts: list[Transition] = []
    for f in m.accepting:
        ts.append(Transition(start, LAMBDA, Z0, _st(f, "pre"), (Z0,)))
    ts.append(Transition(_st(m.initial, "post"), LAMBDA, Z0, acc, (Z0,)))

    for n, t in enumerate(m.transitions):
        if t.target in m.rejecting or t.source in m.halting:
            continue
        if t.read == DOLLAR:
            steps = [(CENT, "pre", "mid")]
        elif t.read == CENT:
            steps = [(DOLLAR, "mid", "post")]
        elif t.read == LAMBDA:
            steps = [(LAMBDA, ph, ph) for ph in _PHASES]
        else:
            steps = [(t.read, "mid", "mid")]
        for read, ph_from, ph_to in steps:
            src, dst = _st(t.target, ph_from), _st(t.source, ph_to)
            eta = t.push
            if not eta:
                for tau in m.stack_alphabet:
                    ts.append(Transition(src, read, tau, dst, (t.pop, tau)))
            elif len(eta) == 1:
                ts.append(Transition(src, read, eta[0], dst, (t.pop,)))
            else:
                hats = [f"^{n}.{k}|{ph_to}" for k in range(1, len(eta))]
                chain = [src, *hats, dst]
                for k, sym in enumerate(eta):
                    r = read if k == 0 else LAMBDA
                    push = (t.pop,) if k == len(eta) - 1 else ()
                    ts.append(Transition(chain[k], r, sym, chain[k + 1], push))

    states = [start]
    for t in ts:
        for q in (t.source, t.target):
            if q not in states and q not in (acc, rej):
                states.append(q)
    states += [acc, rej]
    rev = _rebuild(m, ts, lambda s: cmap[m.color_of(s)], states=states, initial=start,
                   accepting=[acc], rejecting=[rej])
    return dataclasses.replace(rev, colors=tuple(dict.fromkeys(cmap[c] for c in m.colors)))


@dataclass(frozen=True)
class ReversalCertificate:
    input: str
    forward_colors: frozenset[str]
    backward_colors: frozenset[str]
    matched: bool


def certify(m: ColoredAutomaton, rev: ColoredAutomaton, inputs: Iterable[str],
            color_map: Mapping[str, str] | None = None,
            decide: Callable = decide_colors) -> list[ReversalCertificate]:
    """Compare colors of ``m`` on ``w`` with those of ``rev`` on the
    reversed input, using the exact (simulation-free) decision."""
    cmap = dict(default_color_map(m.colors) if color_map is None else color_map)
    out = []
    for w in inputs:
        fwd = decide(m, w).colors
        back = decide(rev, reverse_input(w)).colors
        out.append(ReversalCertificate(w, fwd, back, back == frozenset(cmap[c] for c in fwd)))
    return out

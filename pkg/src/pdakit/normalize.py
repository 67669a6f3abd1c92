"""Conversion of colored automata into ideal shape.

The pipeline runs eight passes in a fixed order:

1. ``remove_useless``, ``unify_halting``, ``delay_halting``
2. ``encode_states``: all control state moves into the stack symbols
3. ``totalize``
4. ``eliminate_nullable``
5. ``eliminate_unit_replacement``
6. ``loop_delay``
7. ``eliminate_lambda_moves``
8. ``bound_push``

From pass 2 on the machine has working states ``q0, q, q_acc, q_rej``
and its ``q -> q`` moves read like grammar productions
``X -> a w`` (pop X, read a or nothing, push w); passes 4 to 7 are the
Greibach normal form construction applied to those productions.

Each pass preserves the color output.  Intermediate machines may have
non-terminating lambda-loops, so equivalence is checked with
:func:`pdakit.colored.decide_colors`, which does not simulate.
"""

from __future__ import annotations

import dataclasses
import itertools
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .colored import ColoredAutomaton, decide_colors, validate_partition
from .core import (
    CENT, DOLLAR, LAMBDA, Z0, Transition, _successors, all_strings,
    tape_of, validate,
)

Q0, QW, QACC, QREJ = "q0", "q", "q_acc", "q_rej"
TOP = None


class PassOrderViolation(Exception):
    """A pass was applied to a machine that lacks its entry condition."""


@dataclass(frozen=True)
class TraceStep:
    name: str
    machine: ColoredAutomaton
    states: int
    symbols: int
    transitions: int


@dataclass
class NormalizationTrace:
    steps: list[TraceStep] = field(default_factory=list)

    def record(self, name: str, m: ColoredAutomaton):
        self.steps.append(TraceStep(name, m, *m.size()))

    def summary(self) -> list[dict]:
        return [
            {"step": s.name, "states": s.states, "symbols": s.symbols, "transitions": s.transitions}
            for s in self.steps
        ]


# --------------------------------------------------------------------------
# helpers

def _rebuild(m: ColoredAutomaton, transitions: Iterable[Transition], color: Callable[[str], str],
             states: Sequence[str] | None = None, initial: str | None = None,
             accepting: Sequence[str] | None = None,
             rejecting: Sequence[str] | None = None) -> ColoredAutomaton:
    """Assemble a machine, deriving its stack alphabet from the moves."""
    transitions = tuple(dict.fromkeys(transitions))
    symbols = {Z0: None}
    for t in transitions:
        symbols.setdefault(t.pop)
        for s in t.push:
            symbols.setdefault(s)
    return dataclasses.replace(
        m,
        states=tuple(m.states if states is None else states),
        stack_alphabet=tuple(symbols),
        transitions=transitions,
        initial=m.initial if initial is None else initial,
        accepting=tuple(m.accepting if accepting is None else accepting),
        rejecting=tuple(m.rejecting if rejecting is None else rejecting),
        partition=tuple((s, color(s)) for s in symbols if s != Z0),
    )


def _fresh(name: str, taken) -> str:
    while name in taken:
        name += "'"
    return name


def _summaries(transitions: Sequence[Transition], accepting: frozenset[str]):
    """Input-independent pop and accept summaries.

    ``pops[p, A]`` holds the states in which a run started in ``p`` with A
    on top can first pop A; ``(p, A) in accp`` when such a run can accept
    while A is still on the stack.
    """
    pops: dict[tuple[str, str], set[str]] = defaultdict(set)
    accp: set[tuple[str, str]] = set()
    changed = True
    while changed:
        changed = False
        for t in transitions:
            key = (t.source, t.pop)
            S = {t.target}
            acc = False
            for y in t.push:
                if S & accepting or any((s, y) in accp for s in S):
                    acc = True
                nxt = set()
                for s in S:
                    nxt |= pops.get((s, y), set())
                S = nxt
                if not S:
                    break
            if acc and key not in accp:
                accp.add(key)
                changed = True
            if S - pops[key]:
                pops[key] |= S
                changed = True
    return pops, accp


def _chains(t: Transition, goal, pops, accp, accepting):
    """State chains through the push string of ``t`` that serve ``goal``.

    For a state goal each chain is ``(s_0, .., s_k)`` with ``s_0`` the
    target, ``s_l`` the state after popping the first l pushed symbols and
    ``s_k == goal``.  For the accept goal a chain ``(s_0, .., s_l)`` ends
    where the run accepts with pushed symbol ``l+1`` still present.
    """
    push = t.push
    k = len(push)
    out = []
    if goal is TOP:
        if k == 0:
            return out
        # good[l]: states at level l from which acceptance is reachable
        good = [set() for _ in range(k)]
        fwd = [{t.target}]
        for l in range(k - 1):
            nxt = set()
            for s in fwd[l]:
                nxt |= pops.get((s, push[l]), set())
            fwd.append(nxt)
        for l in range(k - 1, -1, -1):
            for s in fwd[l]:
                if s in accepting or (s, push[l]) in accp:
                    good[l].add(s)
                elif l + 1 < k and pops.get((s, push[l]), set()) & good[l + 1]:
                    good[l].add(s)

        def walk(chain):
            l = len(chain) - 1
            s = chain[-1]
            if s in accepting or (s, push[l]) in accp:
                out.append(chain)
            if s in accepting or l + 1 >= k:
                return
            for s2 in sorted(pops.get((s, push[l]), set()) & good[l + 1]):
                walk(chain + (s2,))

        if t.target in good[0]:
            walk((t.target,))
        return out

    back = [set() for _ in range(k + 1)]
    back[k] = {goal}
    fwd = [{t.target}]
    for l in range(k):
        nxt = set()
        for s in fwd[l]:
            nxt |= pops.get((s, push[l]), set())
        fwd.append(nxt)
    for l in range(k - 1, -1, -1):
        back[l] = {s for s in fwd[l] if pops.get((s, push[l]), set()) & back[l + 1]}
    if k == 0:
        return [(t.target,)] if t.target == goal else out

    def walk_to(chain):
        l = len(chain) - 1
        if l == k:
            out.append(chain)
            return
        for s2 in sorted(pops.get((chain[-1], push[l]), set()) & back[l + 1]):
            walk_to(chain + (s2,))

    if t.target in back[0]:
        walk_to((t.target,))
    return out


def _useful(m, transitions=None):
    """Transitions that occur on some accepting run (reads unconstrained)."""
    transitions = m.transitions if transitions is None else transitions
    accepting = frozenset(m.accepting)
    pops, accp = _summaries(transitions, accepting)
    moves = defaultdict(list)
    for t in transitions:
        moves[t.source, t.pop].append(t)
    useful: set[Transition] = set()
    if m.initial in accepting:
        return useful
    seen = set()
    work = deque([(m.initial, Z0, TOP)])
    while work:
        ctx = work.popleft()
        if ctx in seen:
            continue
        seen.add(ctx)
        p, a, goal = ctx
        for t in moves.get((p, a), ()):
            chains = _chains(t, goal, pops, accp, accepting)
            if not chains:
                continue
            useful.add(t)
            for chain in chains:
                for l in range(len(chain) - 1):
                    work.append((chain[l], t.push[l], chain[l + 1]))
                if goal is TOP:
                    l = len(chain) - 1
                    if chain[l] not in accepting:
                        work.append((chain[l], t.push[l], TOP))
    return useful


def _is_state_form(m: ColoredAutomaton) -> bool:
    return set(m.states) == {Q0, QW, QACC, QREJ} and m.initial == Q0 and \
        tuple(m.accepting) == (QACC,) and tuple(m.rejecting) == (QREJ,)


def _require_state_form(m, step):
    if not _is_state_form(m):
        raise PassOrderViolation(f"{step} needs a machine with states q0, q, q_acc, q_rej "
                                 "(apply encode_states first)")


def _productions(m):
    """Split moves into q->q productions and everything else."""
    prods, frame = [], []
    for t in m.transitions:
        (prods if t.source == QW and t.target == QW else frame).append(t)
    return prods, frame


def _color_fn(m: ColoredAutomaton, extra: dict | None = None):
    cmap = dict(m.color_map)
    if extra:
        cmap.update(extra)
    return cmap.__getitem__


def _trim(m: ColoredAutomaton) -> ColoredAutomaton:
    keep = _useful(m)
    kept = [t for t in m.transitions if t in keep]
    return _rebuild(m, kept, _color_fn(m))


def sigma_check(m) -> tuple[str, ...]:
    return (CENT, *m.input_alphabet, DOLLAR)


# --------------------------------------------------------------------------
# pass (1)

def remove_useless(m: ColoredAutomaton) -> ColoredAutomaton:
    """Drop stack symbols and moves that occur on no accepting run."""
    return _trim(m)


def unify_halting(m: ColoredAutomaton) -> ColoredAutomaton:
    others = set(m.states) - m.halting
    acc = QACC if QACC not in others else _fresh(QACC, others)
    rej = QREJ if QREJ not in others else _fresh(QREJ, others | {acc})

    def rename(q):
        if q in m.accepting:
            return acc
        if q in m.rejecting:
            return rej
        return q

    ts = [dataclasses.replace(t, source=rename(t.source), target=rename(t.target))
          for t in m.transitions]
    states = [q for q in m.states if q not in m.halting] + [acc, rej]
    return _rebuild(m, ts, _color_fn(m), states=states, accepting=[acc], rejecting=[rej])


def delay_halting(m: ColoredAutomaton) -> ColoredAutomaton:
    """Make halting states reachable only once ``$`` has been scanned.

    States that can be active after ``$`` get a post-``$`` copy carrying
    only the lambda-moves.  A move entering a halting state earlier is
    redirected to a dummy state that keeps reading up to ``$`` and then
    halts.
    """
    if len(m.accepting) != 1 or len(m.rejecting) != 1:
        raise PassOrderViolation("delay_halting needs a single accepting and rejecting state")
    acc, rej = m.accepting[0], m.rejecting[0]
    taken = set(m.states)
    post_states: set[str] = set()
    work = deque(t.target for t in m.transitions
                 if t.read == DOLLAR and t.target not in m.halting)
    while work:
        q = work.popleft()
        if q in post_states:
            continue
        post_states.add(q)
        for t in m.transitions:
            if t.source == q and t.read == LAMBDA and t.target not in m.halting:
                work.append(t.target)
    post = {}
    for q in m.states:
        if q in post_states:
            post[q] = _fresh(f"{q}·$", taken)
            taken.add(post[q])
    d_acc = _fresh("d_acc", taken)
    d_rej = _fresh("d_rej", taken | {d_acc})
    dummy = {acc: d_acc, rej: d_rej}

    def after_dollar(q):
        return q if q in m.halting else post[q]

    ts = []
    used_dummy = set()
    for t in m.transitions:
        if t.read == DOLLAR:
            ts.append(dataclasses.replace(t, target=after_dollar(t.target)))
        elif t.target in m.halting:
            used_dummy.add(t.target)
            ts.append(dataclasses.replace(t, target=dummy[t.target]))
        else:
            ts.append(t)
    for t in m.transitions:
        if t.source in post_states and t.read == LAMBDA:
            ts.append(dataclasses.replace(t, source=post[t.source], target=after_dollar(t.target)))
    for halt in (acc, rej):
        if halt not in used_dummy:
            continue
        d = dummy[halt]
        for a in m.stack_alphabet:
            for s in (CENT, *m.input_alphabet):
                ts.append(Transition(d, s, a, d, (a,)))
            ts.append(Transition(d, DOLLAR, a, halt, (a,)))
    states = [q for q in m.states if q not in m.halting]
    states += [post[q] for q in m.states if q in post]
    states += [dummy[h] for h in (acc, rej) if h in used_dummy] + [acc, rej]
    return _rebuild(m, ts, _color_fn(m), states=states)


# --------------------------------------------------------------------------
# pass (2)

def _triple(p, a, goal, color):
    g = "⊤" if goal is TOP else goal
    tail = f"·{color}" if a == Z0 else ""
    return f"⟨{p},{a},{g}⟩{tail}"


def _inert(a, color):
    return f"⟨⊤,{a}⟩" + (f"·{color}" if a == Z0 else "")


def encode_states(m: ColoredAutomaton) -> ColoredAutomaton:
    """Move the control state into the stack.

    A symbol ``⟨p,A,r⟩`` stands for "A on top in state p, to be popped
    ending in state r"; ``⟨p,A,⊤⟩`` for "A on top in state p, and the run
    accepts before A is popped".  Symbols pushed below an accepting point
    become inert ``⟨⊤,A⟩`` and are cleared by lambda-pops.  The color is
    guessed by the first move, which pushes a color-specific copy of the
    start symbol.  Only combinations consistent with the pop summaries of
    the machine are generated.
    """
    if len(m.accepting) != 1 or len(m.rejecting) != 1:
        raise PassOrderViolation("encode_states needs unify_halting first")
    for t in m.transitions:
        if t.target in m.halting and t.read not in (DOLLAR, LAMBDA):
            raise PassOrderViolation("encode_states needs delay_halting first")
    accepting = frozenset(m.accepting)
    transitions: list[Transition] = []
    colors: dict[str, str] = {}
    for color in m.colors:
        allowed = m.symbols_of(color)
        ts = [t for t in m.transitions if t.pop in allowed and all(s in allowed for s in t.push)]
        pops, accp = _summaries(ts, accepting)
        moves = defaultdict(list)
        for t in ts:
            moves[t.source, t.pop].append(t)

        def sym(p, a, goal):
            s = _triple(p, a, goal, color)
            colors[s] = color if a == Z0 else m.color_of(a)
            return s

        def inert(a):
            s = _inert(a, color)
            colors[s] = color if a == Z0 else m.color_of(a)
            return s

        root = (m.initial, Z0, TOP)
        if m.initial not in accepting and not any(
                _chains(t, TOP, pops, accp, accepting) for t in moves.get((m.initial, Z0), ())):
            continue
        transitions.append(Transition(Q0, LAMBDA, Z0, QW, (sym(*root), Z0)))
        seen = set()
        work = deque([root])
        inerts = {}
        while work:
            ctx = work.popleft()
            if ctx in seen:
                continue
            seen.add(ctx)
            p, a, goal = ctx
            head = sym(p, a, goal)
            if goal is TOP and p in accepting:
                transitions.append(Transition(QW, LAMBDA, head, QW, ()))
                continue
            for t in moves.get((p, a), ()):
                for chain in _chains(t, goal, pops, accp, accepting):
                    body = []
                    for l in range(len(chain) - 1):
                        body.append(sym(chain[l], t.push[l], chain[l + 1]))
                        work.append((chain[l], t.push[l], chain[l + 1]))
                    if goal is TOP:
                        l = len(chain) - 1
                        body.append(sym(chain[l], t.push[l], TOP))
                        work.append((chain[l], t.push[l], TOP))
                        for y in t.push[l + 1:]:
                            body.append(inert(y))
                            inerts[inert(y)] = True
                    transitions.append(Transition(QW, t.read, head, QW, tuple(body)))
        for s in inerts:
            transitions.append(Transition(QW, LAMBDA, s, QW, ()))
    transitions.append(Transition(QW, LAMBDA, Z0, QACC, (Z0,)))
    return _trim(_rebuild(m, transitions, colors.__getitem__, states=[Q0, QW, QACC, QREJ],
                          initial=Q0, accepting=[QACC], rejecting=[QREJ]))


# --------------------------------------------------------------------------
# pass (3)

def _dead(color):
    return f"†{color}"


def totalize(m: ColoredAutomaton) -> ColoredAutomaton:
    """Give every (state, input symbol, stack top) at least one move.

    In the working-state form the added moves replace the top by a dead
    symbol of the same color; dead symbols are carried to ``$`` and then
    rejected, so the stack never empties and nothing halts early.  Other
    machines get direct moves into the rejecting state.
    """
    reads = sigma_check(m)
    have = {(t.source, t.read, t.pop) for t in m.transitions}
    ts = list(m.transitions)
    if not _is_state_form(m):
        rej = m.rejecting[0] if m.rejecting else _fresh("q_rej", set(m.states))
        states = list(m.states) + ([] if m.rejecting else [rej])
        for p in m.states:
            if p in m.halting:
                continue
            for s in reads:
                for a in m.stack_alphabet:
                    if (p, s, a) not in have:
                        ts.append(Transition(p, s, a, rej, (a,)))
        return _rebuild(m, ts, _color_fn(m), states=states, rejecting=[rej])
    extra = {_dead(c): c for c in m.colors}
    first = m.colors[0] if m.colors else None
    gamma = list(m.stack_alphabet)
    if first is not None:
        used = {m.color_of(a) for a in gamma if a != Z0} | {first}
        gamma += [_dead(c) for c in m.colors if c in used and _dead(c) not in gamma]
    color = _color_fn(m, extra)
    for p in (Q0, QW):
        for s in reads:
            for a in gamma:
                if (p, s, a) in have:
                    continue
                if s == DOLLAR:
                    ts.append(Transition(p, s, a, QREJ, (a,)))
                elif first is None:
                    ts.append(Transition(p, s, a, QREJ, (a,)))
                elif a == Z0:
                    ts.append(Transition(p, s, a, QW, (_dead(first), Z0)))
                else:
                    ts.append(Transition(p, s, a, QW, (_dead(color(a)),)))
    return _rebuild(m, ts, color)


# --------------------------------------------------------------------------
# passes (4)-(6): grammar clean-up on q -> q productions

def _nullable(prods) -> set[str]:
    nullable: set[str] = set()
    changed = True
    while changed:
        changed = False
        for t in prods:
            if t.read == LAMBDA and t.pop not in nullable and all(s in nullable for s in t.push):
                nullable.add(t.pop)
                changed = True
    return nullable


def eliminate_nullable(m: ColoredAutomaton) -> ColoredAutomaton:
    """Remove lambda-pops ``X -> λ`` by dropping nullable symbols from pushes.

    A symbol is nullable when lambda-moves alone can pop it.  Every move
    pushing nullable symbols gets all variants with some of them left
    out, except that a lambda-move may not become a lambda-pop.
    """
    _require_state_form(m, "eliminate_nullable")
    prods, frame = _productions(m)
    nullable = _nullable(prods)
    out = []

    def variants(push):
        options = [((s,), ()) if s in nullable else ((s,),) for s in push]
        for combo in itertools.product(*options):
            yield tuple(itertools.chain.from_iterable(combo))

    for t in itertools.chain(frame, prods):
        if t.source == Q0 or (t.source == QW and t.target == QW):
            for w in variants(t.push):
                if t.target == QW and t.source == QW and t.read == LAMBDA and not w:
                    continue
                out.append(dataclasses.replace(t, push=w))
        else:
            out.append(t)
    return _trim(_rebuild(m, out, _color_fn(m)))


def _is_unit(t: Transition) -> bool:
    return t.source == QW and t.target == QW and t.read == LAMBDA and len(t.push) == 1


def eliminate_unit_replacement(m: ColoredAutomaton) -> ColoredAutomaton:
    """Remove single-symbol lambda-replacements ``X -> λ Y``.

    ``X`` inherits every non-unit production of each ``Y`` reachable from
    it through unit productions.
    """
    _require_state_form(m, "eliminate_unit_replacement")
    prods, frame = _productions(m)
    if any(t.read == LAMBDA and not t.push for t in prods):
        raise PassOrderViolation("eliminate_unit_replacement needs eliminate_nullable first")
    units = defaultdict(set)
    for t in prods:
        if _is_unit(t):
            units[t.pop].add(t.push[0])
    by_pop = defaultdict(list)
    for t in prods:
        if not _is_unit(t):
            by_pop[t.pop].append(t)
    out = list(frame)
    for t in prods:
        if not _is_unit(t):
            out.append(t)
    symbols = [s for s in m.stack_alphabet if s != Z0]
    for x in symbols:
        reach, work = set(), list(units.get(x, ()))
        while work:
            y = work.pop()
            if y in reach:
                continue
            reach.add(y)
            work.extend(units.get(y, ()))
        reach.discard(x)
        for y in sorted(reach, key=symbols.index):
            for t in by_pop[y]:
                out.append(dataclasses.replace(t, pop=x))
    return _trim(_rebuild(m, out, _color_fn(m)))


def _left_recursive(t: Transition) -> bool:
    return t.source == QW and t.target == QW and t.read == LAMBDA and t.push[:1] == (t.pop,)


def _delay_loop(x: str, rules: list[tuple[str, tuple]], fresh: str):
    """Loop-delay for one symbol; returns (rules of x, rules of fresh)."""
    loops = [w[1:] for r, w in rules if r == LAMBDA and w[:1] == (x,)]
    base = [(r, w) for r, w in rules if not (r == LAMBDA and w[:1] == (x,))]
    if not loops:
        return rules, []
    new_x = base + [(r, w + (fresh,)) for r, w in base]
    new_b = [(LAMBDA, u) for u in loops] + [(LAMBDA, u + (fresh,)) for u in loops]
    return new_x, new_b


def loop_delay(m: ColoredAutomaton) -> ColoredAutomaton:
    """Remove immediate left recursion ``X -> λ X u``.

    With ``X -> a w`` the remaining productions, a fresh ``X~`` of the same
    color gives ``X -> a w | a w X~`` and ``X~ -> λ u | λ u X~``.
    """
    _require_state_form(m, "loop_delay")
    prods, frame = _productions(m)
    if any(_is_unit(t) or (t.read == LAMBDA and not t.push) for t in prods):
        raise PassOrderViolation("loop_delay needs passes (4) and (5) first")
    rules = defaultdict(list)
    for t in prods:
        rules[t.pop].append((t.read, t.push))
    taken = set(m.stack_alphabet)
    extra = {}
    out = list(frame)
    for x in [s for s in m.stack_alphabet if s in rules]:
        fresh = _fresh(f"{x}~", taken)
        new_x, new_b = _delay_loop(x, rules[x], fresh)
        if new_b:
            taken.add(fresh)
            extra[fresh] = m.color_of(x)
        out += [Transition(QW, r, x, QW, w) for r, w in new_x]
        out += [Transition(QW, r, fresh, QW, w) for r, w in new_b]
    return _trim(_rebuild(m, out, _color_fn(m, extra)))


# --------------------------------------------------------------------------
# pass (7)

def _bottom(x: str) -> str:
    return f"{x}°"


def eliminate_lambda_moves(m: ColoredAutomaton) -> ColoredAutomaton:
    """Make every move read an input symbol.

    (i) with the stack symbols ordered ``a_0 .. a_k``, substitute leading
    ``a_i`` (i < j) in the lambda-productions of ``a_j`` and loop-delay
    what becomes left recursive; (ii) for ``j = k .. 0`` substitute the
    now input-reading productions of the leading symbol; (iii) the same
    for the loop symbols introduced in (i).

    The endmarker lambda-moves (the color guess before ``¢`` and the
    acceptance on an empty stack after ``$``) are folded in with a
    bottom flag: ``X°`` marks the lowest symbol above Z0, and only popping
    it on ``$`` accepts.
    """
    _require_state_form(m, "eliminate_lambda_moves")
    prods, frame = _productions(m)
    if any(t.read == LAMBDA and not t.push for t in prods):
        raise PassOrderViolation("eliminate_lambda_moves needs eliminate_nullable first")
    if any(_is_unit(t) for t in prods):
        raise PassOrderViolation("eliminate_lambda_moves needs eliminate_unit_replacement first")
    if any(_left_recursive(t) for t in prods):
        raise PassOrderViolation("eliminate_lambda_moves needs loop_delay first")

    order = [s for s in m.stack_alphabet if s != Z0]
    rules: dict[str, list] = {x: [] for x in order}
    for t in prods:
        rules[t.pop].append((t.read, t.push))
    taken = set(m.stack_alphabet)
    extra: dict[str, str] = {}
    loop_syms: list[str] = []

    def substitute(rs, lead_ok):
        out = []
        for r, w in rs:
            if r == LAMBDA and lead_ok(w[0]):
                out.extend((r2, w2 + w[1:]) for r2, w2 in rules[w[0]])
            else:
                out.append((r, w))
        return list(dict.fromkeys(out))

    # (i)
    for j, aj in enumerate(order):
        for i in range(j):
            ai = order[i]
            rules[aj] = substitute(rules[aj], lambda s, ai=ai: s == ai)
        fresh = _fresh(f"{aj}′", taken)
        new_a, new_b = _delay_loop(aj, rules[aj], fresh)
        if new_b:
            taken.add(fresh)
            extra[fresh] = m.color_of(aj)
            rules[aj] = list(dict.fromkeys(new_a))
            rules[fresh] = list(dict.fromkeys(new_b))
            loop_syms.append(fresh)

    # (ii) and (iii)
    done: set[str] = set()
    active: set[str] = set()

    def resolve(x):
        if x in done:
            return
        if x in active:
            raise RuntimeError(f"left-recursive cycle through {x!r} survived loop-delay")
        active.add(x)
        while any(r == LAMBDA for r, _ in rules[x]):
            for r, w in rules[x]:
                if r == LAMBDA:
                    resolve(w[0])
            rules[x] = substitute(rules[x], lambda s: True)
        active.discard(x)
        done.add(x)

    for x in reversed(order):
        resolve(x)
    for b in loop_syms:
        resolve(b)

    color = _color_fn(m, extra)
    bottom_colors = {}
    out = []

    def flagged(w):
        b = _bottom(w[-1])
        bottom_colors[b] = color(w[-1])
        return w[:-1] + (b,)

    for t in frame:
        if t.source == Q0 and t.read == LAMBDA and t.pop == Z0:
            start = t.push[0]
            for r, w in rules.get(start, ()):
                if r == CENT and w:
                    out.append(Transition(Q0, CENT, Z0, QW, flagged(w) + (Z0,)))
        elif t.read != LAMBDA and t.target != QACC:
            out.append(t)
    for x, rs in rules.items():
        for r, w in rs:
            if r == DOLLAR:
                if not w:
                    b = _bottom(x)
                    bottom_colors[b] = color(x)
                    out.append(Transition(QW, DOLLAR, b, QACC, ()))
                continue
            out.append(Transition(QW, r, x, QW, w))
            if w:
                b = _bottom(x)
                bottom_colors[b] = color(x)
                out.append(Transition(QW, r, b, QW, flagged(w)))
    extra.update(bottom_colors)
    return _trim(_rebuild(m, out, _color_fn(m, extra)))


# --------------------------------------------------------------------------
# pass (8)

def _compound(v: tuple[str, ...]) -> str:
    return "[" + "·".join(v) + "]"


def bound_push(m: ColoredAutomaton) -> ColoredAutomaton:
    """Push at most two symbols per move.

    A stack symbol ``[v]`` stands for the string ``v``: popping
    ``[X u]`` with the move ``X -> a w`` pushes ``[w][u]``.  The first
    move pushes a single compound onto Z0.
    """
    _require_state_form(m, "bound_push")
    if any(t.read == LAMBDA for t in m.transitions):
        raise PassOrderViolation("bound_push needs eliminate_lambda_moves first")
    by_pop = defaultdict(list)
    starts = []
    for t in m.transitions:
        if t.source == Q0:
            starts.append(t)
        elif t.source == QW:
            by_pop[t.pop].append(t)
    base_color = _color_fn(m)
    colors: dict[str, str] = {}

    def comp(v):
        name = _compound(v)
        colors[name] = base_color(v[0])
        return name

    out = []
    work = deque()
    seen = set()
    for t in starts:
        if t.pop == Z0 and t.push[-1:] == (Z0,) and len(t.push) > 1:
            v = t.push[:-1]
            out.append(Transition(Q0, t.read, Z0, t.target, (comp(v), Z0)))
            work.append(v)
        elif len(t.push) <= 2:
            out.append(t)
    while work:
        v = work.popleft()
        if v in seen:
            continue
        seen.add(v)
        x, u = v[0], v[1:]
        for t in by_pop.get(x, ()):
            push = []
            for part in (t.push, u):
                if part:
                    push.append(comp(part))
                    work.append(part)
            if t.target == QACC and u:
                continue
            out.append(Transition(QW, t.read, comp(v), t.target, tuple(push)))
    return _trim(_rebuild(m, out, colors.__getitem__))


# --------------------------------------------------------------------------
# pipeline

PASSES = (
    ("(1) remove_useless", remove_useless),
    ("(1) unify_halting", unify_halting),
    ("(1) delay_halting", delay_halting),
    ("(2) encode_states", encode_states),
    ("(3) totalize", totalize),
    ("(4) eliminate_nullable", eliminate_nullable),
    ("(5) eliminate_unit_replacement", eliminate_unit_replacement),
    ("(6) loop_delay", loop_delay),
    ("(7) eliminate_lambda_moves", eliminate_lambda_moves),
    ("(8) bound_push", bound_push),
)


def to_ideal_shape(m: ColoredAutomaton, check: bool = True) -> tuple[ColoredAutomaton, NormalizationTrace]:
    """Run all passes, then re-totalize the symbols introduced after (3)."""
    problems = validate(m) + validate_partition(m)
    if problems:
        raise ValueError("invalid machine: " + "; ".join(map(str, problems)))
    trace = NormalizationTrace()
    trace.record("input", m)
    for name, fn in PASSES:
        m = fn(m)
        if check:
            problems = validate(m) + validate_partition(m)
            if problems:
                raise AssertionError(f"{name} produced an invalid machine: {problems[0]}")
        trace.record(name, m)
    m = totalize(m)
    trace.record("final totalize", m)
    return m, trace


# --------------------------------------------------------------------------
# structural scans and the ideal-shape verifier

def lambda_pops(m) -> list[Transition]:
    return [t for t in m.transitions if t.read == LAMBDA and not t.push]


def unit_replacements(m) -> list[Transition]:
    return [t for t in m.transitions if t.read == LAMBDA and len(t.push) == 1
            and t.source == t.target and t.pop != Z0]


def lambda_loops(m) -> list[Transition]:
    return [t for t in m.transitions if t.read == LAMBDA and t.source == t.target
            and len(t.push) >= 2 and t.push[0] == t.pop]


def lambda_reads(m) -> list[Transition]:
    return [t for t in m.transitions if t.read == LAMBDA]


def long_pushes(m, limit: int = 2) -> list[Transition]:
    return [t for t in m.transitions if len(t.push) > limit]


CONDITIONS = ("states", "moves-right", "total", "late-halting", "push-bound", "stack-discipline")


def is_ideal_shape(m: ColoredAutomaton, probe_len: int = 6,
                   probe_inputs: Iterable[str] | None = None) -> tuple[bool, dict[str, bool]]:
    """Check the six ideal-shape conditions.

    Conditions 1-5 and the shape of the first move are static; whether
    the stack stays nonempty mid-run, is empty on acceptance and keeps the
    color fixed by the first push is checked over every input in the
    probe set (all strings up to ``probe_len`` by default).
    """
    verdict = {}
    non_halting = [q for q in m.states if q not in m.halting]
    work = [q for q in non_halting if q != m.initial]
    verdict["states"] = (len(m.states) == 4 and len(m.accepting) == 1 and len(m.rejecting) == 1
                         and m.initial in non_halting and len(work) == 1
                         and all(t.target != m.initial for t in m.transitions)
                         and all(t.target in m.halting or t.target in work for t in m.transitions))
    verdict["moves-right"] = not lambda_reads(m)
    have = {(t.source, t.read, t.pop) for t in m.transitions}
    verdict["total"] = all((p, s, a) in have for p in non_halting
                           for s in sigma_check(m) for a in m.stack_alphabet)
    verdict["late-halting"] = all(t.read == DOLLAR for t in m.transitions if t.target in m.halting)
    verdict["push-bound"] = not long_pushes(m)
    first_ok = all(
        len(t.push) == 2 and t.push[1] == Z0 and t.push[0] != Z0
        for t in m.transitions if t.source == m.initial and t.read == CENT and t.pop == Z0
    )
    verdict["stack-discipline"] = first_ok and verdict["moves-right"] and _probe_stack(
        m, all_strings(m.input_alphabet, probe_len) if probe_inputs is None else probe_inputs)
    return all(verdict.values()), verdict


def _probe_stack(m: ColoredAutomaton, inputs) -> bool:
    for w in inputs:
        tape = tape_of(w)
        frontier = {(m.initial, 0, (Z0,), None)}
        for step in range(len(tape) + 1):
            nxt = set()
            for state, head, stack, color in frontier:
                for t, h, s in _successors(m, tape, state, head, stack):
                    c = color
                    if step == 0:
                        if len(s) != 2:
                            return False
                        c = m.color_of(s[0])
                    if any(x != Z0 and m.color_of(x) != c for x in t.push):
                        return False
                    if t.target in m.accepting:
                        if s != (Z0,):
                            return False
                        continue
                    if t.target in m.halting:
                        continue
                    if len(s) < 2:
                        return False
                    nxt.add((t.target, h, s, c))
            frontier = nxt
            if not frontier:
                break
        if frontier:
            return False
    return True


def regression(m1: ColoredAutomaton, m2: ColoredAutomaton, inputs: Iterable[str]) -> list[str]:
    """Inputs on which the exact color outputs of two machines differ."""
    return [w for w in inputs if decide_colors(m1, w).colors != decide_colors(m2, w).colors]

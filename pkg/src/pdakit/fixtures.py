"""Small machines used by the tests, the experiments and the CLI."""

from __future__ import annotations

import random

from .colored import ColoredAutomaton, from_transducer
from .core import CENT, DOLLAR, LAMBDA, PDA, Z0, Transducer, Transition
from .h3 import H3_VALUES, build_h3_machine

BITS = ("0", "1")


def colored_h3() -> ColoredAutomaton:
    return from_transducer(build_h3_machine(), H3_VALUES)


def palindrome_matcher() -> ColoredAutomaton:
    """Deterministic single-color machine for ``x#xᴿ`` and ``x#xᴿ#y``.

    A marker ``B`` goes down on ``¢``, x is pushed, xᴿ is popped against
    it, y (if present) is skipped, and ``$`` pops the marker before
    accepting.
    """
    gamma = ("B", "0", "1")
    t = [Transition("push", CENT, Z0, "push", ("B", Z0))]
    for s in BITS:
        for a in gamma:
            t.append(Transition("push", s, a, "push", (s, a)))
        t.append(Transition("pop", s, s, "pop", ()))
    for a in gamma:
        t.append(Transition("push", "#", a, "pop", (a,)))
    t.append(Transition("pop", "#", "B", "skip", ("B",)))
    for s in BITS:
        t.append(Transition("skip", s, "B", "skip", ("B",)))
    t.append(Transition("skip", DOLLAR, "B", "done", ()))
    t.append(Transition("pop", DOLLAR, "B", "done", ()))
    t.append(Transition("done", LAMBDA, Z0, "acc", (Z0,)))
    return ColoredAutomaton(
        states=("push", "pop", "skip", "done", "acc", "rej"),
        input_alphabet=("0", "1", "#"), stack_alphabet=(Z0, *gamma),
        transitions=tuple(t), initial="push", accepting=("acc",), rejecting=("rej",),
        colors=("pal",), partition=tuple((a, "pal") for a in gamma),
    )


def dyck_counter() -> ColoredAutomaton:
    """Two colors over {a, b}.

    Color ``dyck``: every prefix has at least as many a's as b's and the
    counts agree at the end.  Color ``equal``: the counts agree.  The
    color is guessed by a lambda-move; b-pops in the ``dyck`` branch go
    through an extra lambda step.
    """
    t = [
        Transition("s", LAMBDA, Z0, "d", ("A0", Z0)),
        Transition("s", LAMBDA, Z0, "e", ("E0", Z0)),
    ]
    t.append(Transition("d", CENT, "A0", "d", ("A0",)))
    for a in ("A0", "A"):
        t.append(Transition("d", "a", a, "d", ("A", a)))
    t.append(Transition("d", "b", "A", "d'", ("A",)))
    t.append(Transition("d'", LAMBDA, "A", "d", ()))
    t.append(Transition("d", DOLLAR, "A0", "fin", ()))
    t.append(Transition("e", CENT, "E0", "e", ("E0",)))
    t += [
        Transition("e", "a", "E0", "e", ("P", "E0")),
        Transition("e", "a", "P", "e", ("P", "P")),
        Transition("e", "a", "N", "e", ()),
        Transition("e", "b", "E0", "e", ("N", "E0")),
        Transition("e", "b", "N", "e", ("N", "N")),
        Transition("e", "b", "P", "e", ()),
        Transition("e", DOLLAR, "E0", "fin", ()),
    ]
    t.append(Transition("fin", LAMBDA, Z0, "acc", (Z0,)))
    return ColoredAutomaton(
        states=("s", "d", "d'", "e", "fin", "acc", "rej"),
        input_alphabet=("a", "b"), stack_alphabet=(Z0, "A0", "A", "E0", "P", "N"),
        transitions=tuple(t), initial="s", accepting=("acc",), rejecting=("rej",),
        colors=("dyck", "equal"),
        partition=(("A0", "dyck"), ("A", "dyck"), ("E0", "equal"), ("P", "equal"), ("N", "equal")),
    )


def random_colored(seed: int, n_states: int = 3, n_moves: int = 14) -> ColoredAutomaton:
    """A seeded random colored machine over {0,1}.

    Lambda-moves only go from a state to a later one in the state order,
    so every run consumes an input cell at least every ``n_states``
    steps and terminates.
    """
    rng = random.Random(seed)
    work = [f"s{k}" for k in range(n_states)]
    colors = ("red", "blue")
    gamma = ("R", "r", "B")
    part = (("R", "red"), ("r", "red"), ("B", "blue"))
    reads = (CENT, "0", "1", DOLLAR, LAMBDA)
    t = set()
    for _ in range(n_moves):
        src = rng.randrange(n_states)
        read = rng.choice(reads)
        pop = rng.choice((Z0,) + gamma)
        if read == LAMBDA:
            if src == n_states - 1:
                continue
            dst = work[rng.randrange(src + 1, n_states)]
        else:
            dst = rng.choice(work + ["acc"] * 2)
        push = tuple(rng.choice(gamma) for _ in range(rng.randrange(3)))
        if pop == Z0:
            push = push + (Z0,)
        t.add(Transition(work[src], read, pop, dst, push))
    # make sure some branch can accept
    t.add(Transition(work[0], CENT, Z0, work[1], (rng.choice(gamma), Z0)))
    t.add(Transition(work[1], DOLLAR, rng.choice(gamma), "acc", ()))
    return ColoredAutomaton(
        states=(*work, "acc", "rej"), input_alphabet=BITS, stack_alphabet=(Z0, *gamma),
        transitions=tuple(sorted(t, key=str)), initial=work[0], accepting=("acc",),
        rejecting=("rej",), colors=colors, partition=part,
    )


def always_rejecting(alphabet=BITS) -> ColoredAutomaton:
    return ColoredAutomaton(
        states=("q0", "q_acc", "q_rej"), input_alphabet=tuple(alphabet), stack_alphabet=(Z0,),
        transitions=(Transition("q0", CENT, Z0, "q_rej", (Z0,)),),
        initial="q0", accepting=("q_acc",), rejecting=("q_rej",), colors=("c",), partition=(),
    )


def idle_scanner(alphabet=("0", "1", "#")) -> ColoredAutomaton:
    """Reads everything, never touches the stack, accepts on ``$``."""
    t = [Transition("q", s, Z0, "q", (Z0,)) for s in (CENT, *alphabet)]
    t.append(Transition("q", DOLLAR, Z0, "acc", (Z0,)))
    return ColoredAutomaton(
        states=("q", "acc", "rej"), input_alphabet=tuple(alphabet), stack_alphabet=(Z0,),
        transitions=tuple(t), initial="q", accepting=("acc",), rejecting=("rej",),
        colors=("c",), partition=(),
    )


def push_only(alphabet=BITS) -> ColoredAutomaton:
    """Pushes one copy of each input symbol; accepts on ``$``."""
    gamma = tuple(alphabet)
    t = [Transition("q", CENT, Z0, "q", (Z0,))]
    for s in alphabet:
        for a in (Z0, *gamma):
            t.append(Transition("q", s, a, "q", (s, a)))
    for a in (Z0, *gamma):
        t.append(Transition("q", DOLLAR, a, "acc", (a,)))
    return ColoredAutomaton(
        states=("q", "acc", "rej"), input_alphabet=tuple(alphabet), stack_alphabet=(Z0, *gamma),
        transitions=tuple(t), initial="q", accepting=("acc",), rejecting=("rej",),
        colors=("c",), partition=tuple((a, "c") for a in gamma),
    )


def lambda_loop() -> PDA:
    """Pushes forever with a lambda self-loop; violates termination."""
    t = (
        Transition("q", CENT, Z0, "q", ("a", Z0)),
        Transition("q", LAMBDA, "a", "q", ("a", "a")),
    )
    return PDA(states=("q", "acc", "rej"), input_alphabet=BITS, stack_alphabet=(Z0, "a"),
               transitions=t, initial="q", accepting=("acc",), rejecting=("rej",))


def first_branch_transducer() -> Transducer:
    """Accepts every input, emitting ``01`` on the ``$``-step."""
    t = [Transition("q", s, Z0, "q", (Z0,)) for s in (CENT, *BITS)]
    t.append(Transition("q", DOLLAR, Z0, "acc", (Z0,), "01"))
    return Transducer(states=("q", "acc", "rej"), input_alphabet=BITS, stack_alphabet=(Z0,),
                      transitions=tuple(t), initial="q", accepting=("acc",), rejecting=("rej",),
                      output_alphabet=BITS)


def random_transducer(seed: int, n_states: int = 4, n_symbols: int = 3,
                      n_outputs: int = 2, n_moves: int = 16) -> Transducer:
    """A seeded random transducer over {0,1}; terminating by the same
    lambda-ordering trick as :func:`random_colored`."""
    rng = random.Random(seed)
    n_states = max(n_states, 2)
    work = [f"p{k}" for k in range(n_states - 2)] or ["p0"]
    states = work + ["acc", "rej"]
    gamma = tuple(f"g{k}" for k in range(n_symbols - 1))
    outs = tuple("ab"[:n_outputs])
    reads = (CENT, "0", "1", DOLLAR, LAMBDA)
    t = set()
    for _ in range(n_moves):
        src = rng.randrange(len(work))
        read = rng.choice(reads)
        pop = rng.choice((Z0,) + gamma)
        if read == LAMBDA:
            if src == len(work) - 1:
                continue
            dst = work[rng.randrange(src + 1, len(work))]
        else:
            dst = rng.choice(work + ["acc", "rej"])
        push = tuple(rng.choice(gamma) for _ in range(rng.randrange(3))) if gamma else ()
        if pop == Z0:
            push = push + (Z0,)
        emit = "".join(rng.choice(outs) for _ in range(rng.randrange(2)))
        t.add(Transition(work[src], read, pop, dst, push, emit))
    return Transducer(states=tuple(states), input_alphabet=BITS, stack_alphabet=(Z0, *gamma),
                      transitions=tuple(sorted(t, key=str)), initial=work[0],
                      accepting=("acc",), rejecting=("rej",), output_alphabet=outs)


def duplicated_branch() -> Transducer:
    """Two identical accepting branches emitting ``0``: ambiguous."""
    t = []
    for branch in ("u", "v"):
        t.append(Transition("q0", CENT, Z0, branch, (Z0,), "0"))
        for s in BITS:
            t.append(Transition(branch, s, Z0, branch, (Z0,)))
        t.append(Transition(branch, DOLLAR, Z0, "acc", (Z0,)))
    return Transducer(states=("q0", "u", "v", "acc", "rej"), input_alphabet=BITS,
                      stack_alphabet=(Z0,), transitions=tuple(t), initial="q0",
                      accepting=("acc",), rejecting=("rej",), output_alphabet=("0",))


def ideal_corpus() -> dict[str, ColoredAutomaton]:
    """The machines that the normalization acceptance run covers."""
    return {
        "colored-h3": colored_h3(),
        "palindrome-matcher": palindrome_matcher(),
        "dyck-counter": dyck_counter(),
        "random-3-state-a": random_colored(246),
        "random-3-state-b": random_colored(134),
    }


def all_fixtures() -> dict[str, PDA]:
    out: dict[str, PDA] = {"h3": build_h3_machine()}
    out.update(ideal_corpus())
    out.update({
        "always-rejecting": always_rejecting(),
        "idle-scanner": idle_scanner(),
        "push-only": push_only(),
        "lambda-loop": lambda_loop(),
        "first-branch": first_branch_transducer(),
        "duplicated-branch": duplicated_branch(),
    })
    return out

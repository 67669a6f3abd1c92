"""The three-part palindrome-pair function h3 and its companions.

``h3(x1#x2#x3)`` is the set of ``0^i 1^j`` over the pairs
``(i, j) in {(1,2), (2,3), (1,3)}`` with ``reverse(x_i) == x_j``; it is
empty on strings outside ``{0,1}*#{0,1}*#{0,1}*``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .colored import I3, pair_value
from .core import CENT, DOLLAR, Z0, FunctionTable, Transducer, Transition

H3_VALUES = tuple(pair_value(p) for p in I3)  # "011", "00111", "0111"


class MalformedInput(ValueError):
    pass


@dataclass(frozen=True)
class TripleInput:
    x1: str
    x2: str
    x3: str

    def __post_init__(self):
        for part in (self.x1, self.x2, self.x3):
            if set(part) - {"0", "1"}:
                raise MalformedInput(f"part {part!r} is not binary")

    @property
    def raw(self) -> str:
        return f"{self.x1}#{self.x2}#{self.x3}"

    @property
    def parts(self) -> tuple[str, str, str]:
        return self.x1, self.x2, self.x3

    @classmethod
    def parse(cls, w: str) -> "TripleInput":
        parts = w.split("#")
        if len(parts) != 3:
            raise MalformedInput(f"{w!r} does not contain exactly two '#'")
        return cls(*parts)


def in_L(w: str) -> bool:
    return w.count("#") == 2 and not set(w) - {"0", "1", "#"}


def h3_oracle(w: str) -> frozenset[str]:
    if not in_L(w):
        return frozenset()
    parts = w.split("#")
    return frozenset(
        pair_value((i, j)) for i, j in I3 if parts[i - 1][::-1] == parts[j - 1]
    )


def in_L3(w: str) -> bool:
    return bool(h3_oracle(w))


def triples(max_part: int):
    """All ``x1#x2#x3`` with parts of length at most ``max_part``."""
    words = [
        "".join(t) for n in range(max_part + 1) for t in itertools.product("01", repeat=n)
    ]
    for x1, x2, x3 in itertools.product(words, repeat=3):
        yield f"{x1}#{x2}#{x3}"


def oracle_table(inputs, length_bound: int | None = None) -> FunctionTable:
    return FunctionTable.from_function(h3_oracle, inputs, length_bound)


def build_h3_machine() -> Transducer:
    """The explicit transducer computing h3.

    After guessing the pair on ¢ (and writing its name), the (1,2) branch
    pushes x1, pops it against x2 and skips x3.  The (2,3) branch skips
    x1, pushes x2 and pops against x3; the (1,3) branch pushes x1, skips
    x2 and pops against x3.  Every combination without a listed move goes
    to q_rej, keeping the machine total on non-lambda reads.
    """
    bits = ("0", "1")
    gamma = ("0", "1", Z0)
    t: list[Transition] = []

    def q(pair, k):
        return f"q{pair[0]}{pair[1]}^{k}"

    for pair in I3:
        t.append(Transition("q0", CENT, Z0, q(pair, 0), (Z0,), pair_value(pair)))

    def store(src, dst):
        for s in bits:
            for a in gamma:
                t.append(Transition(src, s, a, src, (s, a)))
        for a in gamma:
            t.append(Transition(src, "#", a, dst, (a,)))

    def skip(src, dst):
        for s in bits:
            for a in gamma:
                t.append(Transition(src, s, a, src, (a,)))
        for a in gamma:
            t.append(Transition(src, "#", a, dst, (a,)))

    def match(src):
        for s in bits:
            t.append(Transition(src, s, s, src, ()))

    # (1,2): store x1, match x2, skip x3
    store(q((1, 2), 0), q((1, 2), 1))
    match(q((1, 2), 1))
    t.append(Transition(q((1, 2), 1), "#", Z0, q((1, 2), 2), (Z0,)))
    for s in bits:
        t.append(Transition(q((1, 2), 2), s, Z0, q((1, 2), 2), (Z0,)))
    t.append(Transition(q((1, 2), 2), DOLLAR, Z0, "q_acc", (Z0,)))

    # (2,3): skip x1, store x2, match x3
    skip(q((2, 3), 0), q((2, 3), 1))
    store(q((2, 3), 1), q((2, 3), 2))
    match(q((2, 3), 2))
    t.append(Transition(q((2, 3), 2), DOLLAR, Z0, "q_acc", (Z0,)))

    # (1,3): store x1, skip x2, match x3
    store(q((1, 3), 0), q((1, 3), 1))
    skip(q((1, 3), 1), q((1, 3), 2))
    match(q((1, 3), 2))
    t.append(Transition(q((1, 3), 2), DOLLAR, Z0, "q_acc", (Z0,)))

    working = ["q0"] + [q(p, k) for p in I3 for k in range(3)]
    sigma_check = (CENT, "0", "1", "#", DOLLAR)
    defined = {(x.source, x.read, x.pop) for x in t}
    for src in working:
        for r in sigma_check:
            for a in gamma:
                if (src, r, a) not in defined:
                    t.append(Transition(src, r, a, "q_rej", (a,)))

    return Transducer(
        states=tuple(working) + ("q_acc", "q_rej"),
        input_alphabet=("0", "1", "#"),
        stack_alphabet=gamma,
        transitions=tuple(t),
        initial="q0",
        accepting=("q_acc",),
        rejecting=("q_rej",),
        output_alphabet=("0", "1"),
    )


def substring_fixture(max_len: int) -> tuple[FunctionTable, FunctionTable]:
    """Tables for ``f(1^n#x)`` = substrings of x with length in [1, n] and
    its refinement ``g(1^n#x)`` = {first symbol of x}, for 1 <= n <= |x|."""
    if max_len > 12:
        raise ValueError("max_len is capped at 12")
    f, g = {}, {}
    for n in range(1, max_len + 1):
        for k in range(n, max_len - n):
            for tup in itertools.product("01", repeat=k):
                x = "".join(tup)
                key = "1" * n + "#" + x
                f[key] = {x[a:b] for a in range(len(x)) for b in range(a + 1, min(a + n, len(x)) + 1)}
                g[key] = {x[0]}
    return FunctionTable(f, max_len), FunctionTable(g, max_len)

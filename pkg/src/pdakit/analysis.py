"""Stack histories and the combinatorial objects built on them.

Positions index the tape ``¢ w $``: position 0 is ``¢``, positions
``1..|w|`` the input symbols and ``|w|+1`` the ``$``.  The snapshot at
position i is the stack right after the move that reads cell i;
lambda-moves taken before the next read show up in the next snapshot.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass, field

from .colored import ColoredAutomaton, enumerate_colors, pair_value, path_has_color
from .core import LAMBDA, Z0, ComputationPath, enumerate_paths, tape_of

Stack = tuple[str, ...]


class UndefinedPath(LookupError):
    """The path assignment has no path for the requested input and color."""


class IdealShapeRequired(ValueError):
    """The operation needs a single working state and no lambda-moves."""


@dataclass(frozen=True)
class StackHistory:
    input: str
    snapshots: tuple[Stack, ...]

    def __post_init__(self):
        for s in self.snapshots:
            if not s or s[-1] != Z0:
                raise ValueError(f"snapshot {s!r} does not end in Z0")

    def __getitem__(self, i: int) -> Stack:
        return self.snapshots[i]

    def __len__(self):
        return len(self.snapshots)

    def heights(self) -> list[int]:
        return [len(s) - 1 for s in self.snapshots]


def stack_history(m, input: str, path: ComputationPath) -> StackHistory:
    """Snapshots at every tape position along ``path``.

    Positions the path never reads (it halted early) repeat the final
    stack.
    """
    cells = len(tape_of(input))
    snaps: list[Stack | None] = [None] * cells
    configs = path.configurations
    for before, t, after in zip(configs, path.moves, configs[1:]):
        if t.read != LAMBDA:
            snaps[before.head] = after.stack
    # reads are consecutive from position 0, so only a tail can be unread
    snaps = [configs[-1].stack if s is None else s for s in snaps]
    return StackHistory(input, tuple(snaps))


def _color(color) -> str:
    return pair_value(color) if isinstance(color, tuple) else color


def triple_input(x: str, y: str) -> str:
    return f"{x}#{x[::-1]}#{y}"


def compute_H(x: str) -> set[str]:
    if set(x) - {"0", "1"}:
        raise ValueError(f"{x!r} is not binary")
    return {"".join(t) for t in itertools.product("01", repeat=len(x))} - {x, x[::-1]}


def compute_D(m: ColoredAutomaton, n: int, color, step_bound: int | None = None) -> set[str]:
    """Length-n strings x with an accepting ``color`` path on ``x#xᴿ#x``."""
    c = _color(color)
    out = set()
    for t in itertools.product("01", repeat=n):
        x = "".join(t)
        if c in enumerate_colors(m, triple_input(x, x), step_bound).colors:
            out.add(x)
    return out


@dataclass
class PathAssignment:
    """Picks one accepting path per ``(x, y, color)``.

    The pick is the first accepting path of that color in the order of
    :func:`pdakit.core.enumerate_paths` (shortest first, then by
    transition declaration order), so it is reproducible.
    """

    machine: ColoredAutomaton
    step_bound: int | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __call__(self, x: str, y: str, color=(1, 2)) -> ComputationPath | None:
        key = (x, y, _color(color))
        if key not in self._cache:
            w = triple_input(x, y)
            c = key[2]
            self._cache[key] = next(
                (p for p in enumerate_paths(self.machine, w, self.step_bound)
                 if p.accepted and path_has_color(p, self.machine, c)),
                None,
            )
        return self._cache[key]

    def history(self, x: str, y: str, color=(1, 2)) -> StackHistory | None:
        p = self(x, y, color)
        return None if p is None else stack_history(self.machine, triple_input(x, y), p)


def compute_E(m: ColoredAutomaton, x: str, pi: PathAssignment | None = None,
              color=(1, 2)) -> set[Stack]:
    """Stacks at position ``|x#xᴿ#|`` along the assigned paths, y over H_x."""
    pi = pi or PathAssignment(m)
    pos = 2 * len(x) + 2
    out = set()
    for y in sorted(compute_H(x)):
        h = pi.history(x, y, color)
        if h is not None:
            out.add(h[pos])
    return out


def compute_MSC(m: ColoredAutomaton, x: str, y: str, pi: PathAssignment | None = None,
                color=(1, 2)) -> frozenset[tuple[int, Stack]]:
    """Minimal-height snapshots between ``|x#|`` and ``|x#xᴿ#|``.

    Returned as ``(position, stack)`` pairs so that equal stacks at
    different positions are all reported.
    """
    pi = pi or PathAssignment(m)
    h = pi.history(x, y, color)
    if h is None:
        raise UndefinedPath(f"no accepting {_color(color)} path on {triple_input(x, y)!r}")
    lo, hi = len(x) + 1, 2 * len(x) + 2
    low = min(len(h[i]) for i in range(lo, hi + 1))
    return frozenset((i, h[i]) for i in range(lo, hi + 1) if len(h[i]) == low)


def as_stack(m, s) -> Stack:
    """A stack string without Z0, from a sequence of symbols or a string.

    Strings are split greedily into the longest stack symbols.
    """
    if not isinstance(s, str):
        return tuple(s)
    symbols = sorted((a for a in m.stack_alphabet if a != Z0), key=len, reverse=True)
    out, i = [], 0
    while i < len(s):
        for a in symbols:
            if a and s.startswith(a, i):
                out.append(a)
                i += len(a)
                break
        else:
            raise ValueError(f"cannot split {s!r} into stack symbols")
    return tuple(out)


def _working_state(m) -> str:
    work = [q for q in m.states if q not in m.halting and q != m.initial]
    if len(work) != 1 or any(t.read == LAMBDA for t in m.transitions):
        raise IdealShapeRequired("need a single working state and no lambda-moves "
                                 "(run to_ideal_shape first)")
    return work[0]


def tf_member(m: ColoredAutomaton, u, v, z: str, z2: str,
              step_bound: int | None = None) -> bool:
    """Whether reading ``z#z2`` can take stack ``uZ0`` to ``vZ0``.

    The subpath starts and ends in the working state, reads exactly
    ``z#z2`` and never leaves bare Z0 on the stack strictly inside.
    ``step_bound`` caps the subpath length (one move per symbol).
    """
    q = _working_state(m)
    word = z + "#" + z2
    if step_bound is not None and len(word) > step_bound:
        return False
    start = as_stack(m, u) + (Z0,)
    goal = as_stack(m, v) + (Z0,)
    frontier = {start}
    for k, sym in enumerate(word):
        nxt = set()
        for stack in frontier:
            for t in m.moves.get((q, stack[0]), ()):
                if t.read != sym or t.target != q:
                    continue
                s = t.push + stack[1:]
                if k < len(word) - 1 and s == (Z0,):
                    continue
                nxt.add(s)
        frontier = nxt
        if not frontier:
            return False
    return goal in frontier


def check_no_repeat(h: StackHistory, lo: int, hi: int) -> list[tuple[int, int]]:
    """Pairs ``lo <= i1 < i2 <= hi`` with equal snapshots."""
    if not 0 <= lo < hi <= len(h) - 1:
        raise ValueError(f"need 0 <= lo < hi <= {len(h) - 1}")
    return [(i, j) for i in range(lo, hi + 1) for j in range(i + 1, hi + 1) if h[i] == h[j]]


def check_pairwise_distinct(items: Sequence[tuple[StackHistory, int]]) -> list[tuple[int, int]]:
    """Index pairs of ``(history, position)`` items whose snapshots agree."""
    snaps = [h[pos] for h, pos in items]
    return [(i, j) for i in range(len(snaps)) for j in range(i + 1, len(snaps))
            if snaps[i] == snaps[j]]

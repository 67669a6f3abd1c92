"""Machine files.

A machine file is a JSON object with keys ``states``, ``input_alphabet``,
``stack_alphabet`` (listing ``"Z0"``), ``initial``, ``accepting``,
``rejecting`` and ``transitions``.  Each transition is an object
``{from, read, pop, to, push}``; ``read`` is an input symbol or one of
``"CENT"``, ``"DOLLAR"``, ``"LAMBDA"`` and ``push`` lists the pushed
symbols top first.  Transducer files add ``output_alphabet`` and an
``emit`` string per transition; colored-machine files add ``colors`` and
a ``partition`` object mapping stack symbols to colors.
"""

from __future__ import annotations

import json
from pathlib import Path

from .colored import ColoredAutomaton
from .core import CENT, DOLLAR, LAMBDA, PDA, Z0, FunctionTable, Transducer, Transition

READ_TOKENS = {"CENT": CENT, "DOLLAR": DOLLAR, "LAMBDA": LAMBDA}
_READ_NAMES = {v: k for k, v in READ_TOKENS.items()}


class FormatError(ValueError):
    pass


def kind_of(m: PDA) -> str:
    if isinstance(m, ColoredAutomaton):
        return "colored"
    if isinstance(m, Transducer):
        return "transducer"
    return "pda"


def to_dict(m: PDA) -> dict:
    transitions = []
    for t in m.transitions:
        d = {"from": t.source, "read": _READ_NAMES.get(t.read, t.read), "pop": t.pop,
             "to": t.target, "push": list(t.push)}
        if isinstance(m, Transducer):
            d["emit"] = t.emit
        transitions.append(d)
    out = {
        "states": list(m.states),
        "input_alphabet": list(m.input_alphabet),
        "stack_alphabet": list(m.stack_alphabet),
        "initial": m.initial,
        "accepting": list(m.accepting),
        "rejecting": list(m.rejecting),
    }
    if isinstance(m, Transducer):
        out["output_alphabet"] = list(m.output_alphabet)
    if isinstance(m, ColoredAutomaton):
        out["colors"] = list(m.colors)
        out["partition"] = dict(m.partition)
    out["transitions"] = transitions
    return out


def serialize(m: PDA) -> str:
    return json.dumps(to_dict(m), indent=1, ensure_ascii=False) + "\n"


def _split_push(text: str, gamma: list[str]) -> tuple[str, ...]:
    symbols = sorted(gamma, key=len, reverse=True)
    out, i = [], 0
    while i < len(text):
        for a in symbols:
            if a and text.startswith(a, i):
                out.append(a)
                i += len(a)
                break
        else:
            raise FormatError(f"push string {text!r} is not over the stack alphabet")
    return tuple(out)


def from_dict(d: dict) -> PDA:
    required = ("states", "input_alphabet", "stack_alphabet", "initial", "accepting",
                "rejecting", "transitions")
    missing = [k for k in required if k not in d]
    if missing:
        raise FormatError(f"missing keys: {', '.join(missing)}")
    if "output_alphabet" in d and "colors" in d:
        raise FormatError("a file may describe a transducer or a colored machine, not both")
    gamma = list(d["stack_alphabet"])
    if Z0 not in gamma:
        raise FormatError('stack_alphabet must list "Z0"')
    reserved = set(READ_TOKENS) | {Z0}
    if reserved & set(d["input_alphabet"]):
        raise FormatError("input_alphabet may not use reserved tokens")
    transducer = "output_alphabet" in d
    transitions = []
    for k, raw in enumerate(d["transitions"]):
        try:
            read = READ_TOKENS.get(raw["read"], raw["read"])
            push = raw["push"]
            push = _split_push(push, gamma) if isinstance(push, str) else tuple(push)
            emit = raw.get("emit", "")
            if emit and not transducer:
                raise FormatError(f"transition {k} emits output but the file has no output_alphabet")
            transitions.append(Transition(raw["from"], read, raw["pop"], raw["to"], push, emit))
        except KeyError as e:
            raise FormatError(f"transition {k} lacks key {e.args[0]!r}") from None
        except (TypeError, ValueError) as e:
            if isinstance(e, FormatError):
                raise
            raise FormatError(f"transition {k}: {e}") from None
    common = dict(
        states=tuple(d["states"]), input_alphabet=tuple(d["input_alphabet"]),
        stack_alphabet=tuple(gamma), transitions=tuple(transitions), initial=d["initial"],
        accepting=tuple(d["accepting"]), rejecting=tuple(d["rejecting"]),
    )
    if transducer:
        return Transducer(**common, output_alphabet=tuple(d["output_alphabet"]))
    if "colors" in d:
        part = d.get("partition", {})
        if not isinstance(part, dict):
            raise FormatError("partition must map stack symbols to colors")
        return ColoredAutomaton(**common, colors=tuple(d["colors"]), partition=tuple(part.items()))
    return PDA(**common)


def parse(text: str) -> PDA:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"not valid JSON: {e}") from None
    if not isinstance(d, dict):
        raise FormatError("a machine file holds a single object")
    return from_dict(d)


def load(path) -> PDA:
    return parse(Path(path).read_text(encoding="utf-8"))


def dump(m: PDA, path) -> None:
    Path(path).write_text(serialize(m), encoding="utf-8")


def table_to_dict(t: FunctionTable) -> dict:
    return {"length_bound": t.length_bound,
            "entries": {w: sorted(v) for w, v in t.entries.items()}}


def table_from_dict(d: dict) -> FunctionTable:
    return FunctionTable({w: set(v) for w, v in d["entries"].items()}, d["length_bound"])

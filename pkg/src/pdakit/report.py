"""Reports and the experiment suites behind ``pdakit experiment``."""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
import json

from . import __version__
from .analysis import (
    PathAssignment, check_no_repeat, check_pairwise_distinct, compute_D, compute_E, compute_H,
    compute_MSC,
)
from .colored import ColoredAutomaton, pair_value
from .fileformat import serialize

DEFAULT_CAP = 8
SUITES = ("dsets", "ex", "msc", "lemmas")


class CapExceeded(ValueError):
    pass


def machine_digest(m) -> str:
    return hashlib.sha256(serialize(m).encode("utf-8")).hexdigest()


def build_report(command: list[str], payload: dict, machine=None,
                 timing: float | None = None) -> dict:
    body = {
        "tool_version": __version__,
        "command": list(command),
        "machine_digest": None if machine is None else machine_digest(machine),
        "payload": payload,
    }
    body["report_digest"] = hashlib.sha256(dumps(body).encode("utf-8")).hexdigest()
    if timing is not None:
        body["timing"] = {"seconds": round(timing, 3)}
    return body


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def _words(n: int):
    return ["".join(t) for t in itertools.product("01", repeat=n)]


def _stack(s) -> str:
    return " ".join(s)


def resolve_color(m: ColoredAutomaton, color: str | None) -> str:
    """``"i,j"`` names the pair color ``0^i1^j``; anything else is taken
    literally.  Without a choice: ``011`` when present, else the first color."""
    if color is None:
        return pair_value((1, 2)) if pair_value((1, 2)) in m.colors else m.colors[0]
    if "," in color:
        i, j = (int(p) for p in color.split(","))
        color = pair_value((i, j))
    if color not in m.colors:
        raise ValueError(f"machine has no color {color!r}")
    return color


def check_cap(n: int, force: bool, cap: int = DEFAULT_CAP):
    if n > cap and not force:
        raise CapExceeded(f"--n {n} is above the cap of {cap}; pass --force to run anyway")


def suite_dsets(m: ColoredAutomaton, n: int, step_bound=None) -> dict:
    table = {c: {str(k): sorted(compute_D(m, k, c, step_bound)) for k in range(1, n + 1)}
             for c in m.colors}
    out = {"n": n, "D": table}
    a, b = pair_value((1, 2)), pair_value((2, 3))
    if a in table and b in table:
        out["union_12_23_is_full"] = {
            str(k): set(table[a][str(k)]) | set(table[b][str(k)]) == set(_words(k))
            for k in range(1, n + 1)
        }
    return out


def suite_ex(m: ColoredAutomaton, n: int, color: str, step_bound=None) -> dict:
    pi = PathAssignment(m, step_bound)
    rows = []
    for x in _words(n):
        e = compute_E(m, x, pi, color)
        rows.append({"x": x, "H_size": len(compute_H(x)), "E_size": len(e),
                     "E": sorted(_stack(s) for s in e)})
    return {"n": n, "color": color, "position": 2 * n + 2, "rows": rows}


def suite_msc(m: ColoredAutomaton, n: int, color: str, step_bound=None) -> dict:
    pi = PathAssignment(m, step_bound)
    rows = []
    for x in _words(n):
        for y in sorted(compute_H(x)):
            if pi(x, y, color) is None:
                rows.append({"x": x, "y": y, "msc": None})
                continue
            msc = compute_MSC(m, x, y, pi, color)
            rows.append({"x": x, "y": y,
                         "msc": [[i, _stack(s)] for i, s in sorted(msc)]})
    return {"n": n, "color": color, "rows": rows}


def suite_lemmas(m: ColoredAutomaton, n: int, color: str, step_bound=None) -> dict:
    """No-repeat checks on the pushing segment ``[0, n]`` and the matching
    segment ``[n+1, 2n+1]`` of ``x#xᴿ#x``, and pairwise distinctness of
    the stacks at ``|x#xᴿ#|`` across x."""
    pi = PathAssignment(m, step_bound)
    rows, items, names = [], [], []
    for x in _words(n):
        h = pi.history(x, x, color)
        if h is None:
            rows.append({"x": x, "path": False})
            continue
        push = check_no_repeat(h, 0, n)
        match = check_no_repeat(h, n + 1, 2 * n + 1)
        rows.append({"x": x, "path": True, "push_segment": [list(p) for p in push],
                     "match_segment": [list(p) for p in match]})
        items.append((h, 2 * n + 2))
        names.append(x)
    clashes = [[names[i], names[j]] for i, j in check_pairwise_distinct(items)]
    return {
        "n": n, "color": color, "rows": rows,
        "no_repeat_violations": sum(len(r.get("push_segment", [])) + len(r.get("match_segment", []))
                                    for r in rows),
        "pairwise_collisions": clashes,
    }


def run_suite(m: ColoredAutomaton, suite: str, n: int, color: str | None = None,
              step_bound=None, force: bool = False) -> dict:
    check_cap(n, force)
    if suite == "dsets":
        return suite_dsets(m, n, step_bound)
    c = resolve_color(m, color)
    if suite == "ex":
        return suite_ex(m, n, c, step_bound)
    if suite == "msc":
        return suite_msc(m, n, c, step_bound)
    if suite == "lemmas":
        return suite_lemmas(m, n, c, step_bound)
    raise ValueError(f"unknown suite {suite!r}")


def to_csv(suite: str, payload: dict) -> str:
    """CSV view of the D-set and E tables."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if suite == "dsets":
        w.writerow(["color", "n", "x"])
        for c in sorted(payload["D"]):
            for k, xs in sorted(payload["D"][c].items(), key=lambda kv: int(kv[0])):
                for x in xs:
                    w.writerow([c, k, x])
    elif suite == "ex":
        w.writerow(["x", "H_size", "E_size", "E"])
        for r in payload["rows"]:
            w.writerow([r["x"], r["H_size"], r["E_size"], "|".join(r["E"])])
    else:
        raise ValueError("CSV export covers the dsets and ex suites")
    return buf.getvalue()

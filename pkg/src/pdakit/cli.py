"""``pdakit`` command line.

Exit codes: 0 success, 1 parse/validation/usage error, 2 termination
violation, 3 equivalence or certificate mismatch.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import fileformat, fixtures
from .colored import ColoredAutomaton, enumerate_colors, validate_partition
from .core import (
    PDA, TerminationViolation, Transducer, all_strings, enumerate_outputs, enumerate_paths,
    validate,
)
from .h3 import substring_fixture, triples
from .normalize import is_ideal_shape, regression, to_ideal_shape
from .report import CapExceeded, SUITES, build_report, dumps, run_suite, to_csv
from .reversal import certify, reverse

OK, ERROR, NONTERMINATING, MISMATCH = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _load(path: str) -> PDA:
    try:
        m = fileformat.load(path)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    except ValueError as e:
        raise UsageError(f"{path}: {e}") from None
    problems = validate(m)
    if isinstance(m, ColoredAutomaton):
        problems += validate_partition(m)
    if problems:
        raise UsageError(f"{path}: " + "; ".join(str(p) for p in problems))
    return m


def _colored(path: str) -> ColoredAutomaton:
    m = _load(path)
    if not isinstance(m, ColoredAutomaton):
        raise UsageError(f"{path} is a {fileformat.kind_of(m)} file; a colored machine is needed")
    return m


def _path_record(p) -> dict:
    return {
        "verdict": p.verdict,
        "halted": p.halted,
        "output": p.output,
        "moves": [str(t) for t in p.moves],
        "final_stack": list(p.configurations[-1].stack),
    }


def cmd_run(args) -> tuple[int, dict, PDA]:
    m = _load(args.machine)
    if set(args.input) - set(m.input_alphabet):
        raise UsageError(f"input {args.input!r} uses symbols outside {list(m.input_alphabet)}")
    mode = args.mode or ("colors" if isinstance(m, ColoredAutomaton) else "outputs")
    if mode == "paths":
        paths = enumerate_paths(m, args.input, args.bound)
        payload = {"input": args.input, "paths": [_path_record(p) for p in paths]}
    elif mode == "colors":
        if not isinstance(m, ColoredAutomaton):
            raise UsageError("--colors needs a colored machine")
        payload = {"input": args.input,
                   "colors": sorted(enumerate_colors(m, args.input, args.bound).colors)}
    else:
        payload = {"input": args.input, "outputs": sorted(enumerate_outputs(m, args.input, args.bound))}
    return OK, payload, m


def cmd_normalize(args) -> tuple[int, dict, PDA]:
    m = _colored(args.machine)
    out, trace = to_ideal_shape(m)
    ok, verdict = is_ideal_shape(out)
    payload = {"ideal_shape": ok, "conditions": verdict, "size": list(out.size())}
    if args.trace:
        payload["trace"] = trace.summary()
    code = OK
    if args.regress is not None:
        bad = regression(m, out, all_strings(m.input_alphabet, args.regress))
        payload["regression"] = {"max_len": args.regress, "mismatches": bad}
        if bad:
            code = MISMATCH
    if args.out:
        fileformat.dump(out, args.out)
    return code, payload, m


def cmd_check(args) -> tuple[int, dict, PDA]:
    try:
        m = fileformat.load(args.machine)
    except OSError as e:
        raise UsageError(f"cannot read {args.machine}: {e.strerror}") from None
    problems = [str(p) for p in validate(m)]
    payload = {"kind": fileformat.kind_of(m)}
    if isinstance(m, ColoredAutomaton):
        problems += [str(p) for p in validate_partition(m)]
        ok, verdict = is_ideal_shape(m, probe_len=args.probe)
        payload.update(ideal_shape=ok, conditions=verdict)
    payload["diagnostics"] = problems
    return (ERROR if problems else OK), payload, m


def cmd_reverse(args) -> tuple[int, dict, PDA]:
    m = _load(args.machine)
    if isinstance(m, Transducer) or not isinstance(m, ColoredAutomaton):
        raise UsageError("reverse needs a colored machine (compile transducers first)")
    rev = reverse(m)
    payload = {"size": list(rev.size()), "colors": list(rev.colors)}
    code = OK
    if args.certify is not None:
        certs = certify(m, rev, triples(args.certify))
        failed = [c.input for c in certs if not c.matched]
        payload["certificates"] = {"max_part": args.certify, "checked": len(certs),
                                   "mismatches": failed}
        if failed:
            code = MISMATCH
    if args.out:
        fileformat.dump(rev, args.out)
    return code, payload, m


def cmd_experiment(args) -> tuple[int, dict, PDA]:
    path = args.machine or args.machine_opt
    if not path:
        raise UsageError("experiment needs a machine file")
    m = _colored(path)
    payload = run_suite(m, args.suite, args.n, args.color, args.bound, args.force)
    if args.csv:
        Path(args.csv).write_text(to_csv(args.suite, payload), encoding="utf-8")
    return OK, {"suite": args.suite, **payload}, m


def cmd_fixtures(args) -> tuple[int, dict, None]:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, m in fixtures.all_fixtures().items():
        fileformat.dump(m, out / f"{name}.json")
        written.append(f"{name}.json")
    f, g = substring_fixture(args.substring_len)
    for name, table in (("substring-f", f), ("substring-first", g)):
        (out / f"{name}.json").write_text(dumps(fileformat.table_to_dict(table)), encoding="utf-8")
        written.append(f"{name}.json")
    return OK, {"directory": str(out), "files": sorted(written)}, None


def build_parser() -> argparse.ArgumentParser:
    def global_flags(suppress: bool) -> argparse.ArgumentParser:
        # subcommands repeat the global flags; SUPPRESS keeps their defaults
        # from overwriting values given before the subcommand
        g = argparse.ArgumentParser(add_help=False)
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        g.add_argument("--bound", type=int, default=d(None), help="step bound for simulation")
        g.add_argument("--report", default=d(None), help="also write the report to this file")
        g.add_argument("--quiet", action="store_true", default=d(False),
                       help="do not print the report")
        g.add_argument("--timing", action="store_true", default=d(False),
                       help="add wall-clock timing to the report (breaks byte stability)")
        return g

    common = global_flags(True)
    p = argparse.ArgumentParser(prog="pdakit", parents=[global_flags(False)],
                                description="Pushdown transducers and colored automata.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", parents=[common], help="simulate a machine on one input")
    r.add_argument("machine")
    r.add_argument("input")
    g = r.add_mutually_exclusive_group()
    for flag in ("paths", "outputs", "colors"):
        g.add_argument(f"--{flag}", dest="mode", action="store_const", const=flag)
    r.set_defaults(fn=cmd_run)

    n = sub.add_parser("normalize", parents=[common], help="convert to ideal shape")
    n.add_argument("machine")
    n.add_argument("--out")
    n.add_argument("--trace", action="store_true")
    n.add_argument("--regress", type=int, metavar="L")
    n.set_defaults(fn=cmd_normalize)

    c = sub.add_parser("check", parents=[common], help="validate and test ideal shape")
    c.add_argument("machine")
    c.add_argument("--probe", type=int, default=6, help="input length for the stack probe")
    c.set_defaults(fn=cmd_check)

    v = sub.add_parser("reverse", parents=[common], help="build the reversed machine")
    v.add_argument("machine")
    v.add_argument("--out")
    v.add_argument("--certify", type=int, metavar="B")
    v.set_defaults(fn=cmd_reverse)

    e = sub.add_parser("experiment", parents=[common], help="run an analysis suite")
    e.add_argument("machine", nargs="?")
    e.add_argument("--machine", dest="machine_opt")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--suite", choices=SUITES, default="dsets")
    e.add_argument("--color", help='color name or "i,j"')
    e.add_argument("--csv", help="CSV export (dsets and ex suites)")
    e.add_argument("--force", action="store_true", help="allow --n above the cap")
    e.set_defaults(fn=cmd_experiment)

    f = sub.add_parser("fixtures", parents=[common], help="write the fixture machines")
    f.add_argument("--out", default="fixtures")
    f.add_argument("--substring-len", type=int, default=8)
    f.set_defaults(fn=cmd_fixtures)
    return p


def _echo(argv: list[str]) -> list[str]:
    """The command minus flags that only route output."""
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
        elif a == "--report":
            skip = True
        elif a in ("--quiet", "--timing") or a.startswith("--report="):
            continue
        else:
            out.append(a)
    return out


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        code, payload, machine = args.fn(args)
    except TerminationViolation as e:
        print(f"error: {e}", file=sys.stderr)
        return NONTERMINATING
    except (UsageError, CapExceeded, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return ERROR
    elapsed = time.perf_counter() - start if args.timing else None
    report = build_report(_echo(argv), payload, machine, elapsed)
    text = dumps(report)
    if args.report:
        Path(args.report).write_text(text, encoding="utf-8")
    if not args.quiet:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

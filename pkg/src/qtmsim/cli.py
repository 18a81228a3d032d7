"""Command-line interface.

Exit codes (stable):

    0  success (run: halted)
    1  validation failed
    2  parse failure, unreadable file or bad arguments
    3  run: machine got stuck
    4  run: step limit reached
    5  machine kind does not fit the subcommand
    6  paths: path budget exceeded (partial output printed)
"""
from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from .errors import MachineParseError, PathBudgetExceeded, UnknownSymbol, ValidationFailed
from .evolution import aggregate_paths, enumerate_paths, evolve, run_deterministic, sample_outcomes, sample_run
from .gates import BooleanFunctionTable, deutsch_decide
from .machine import Configuration, Kind, MachineDescription, WeightedState, format_symbols, validate
from .textfmt import load_machine

EXIT_OK, EXIT_INVALID, EXIT_PARSE, EXIT_STUCK, EXIT_STEP_LIMIT, EXIT_WRONG_KIND, EXIT_BUDGET = range(7)

RECORD_FIELDS = ("state", "head", "tape", "re", "im", "prob")


class _Exit(Exception):
    def __init__(self, code):
        self.code = code


def fixture_path(name: str) -> Path:
    """Path of a machine file shipped with the package."""
    return Path(str(resources.files("qtmsim") / "fixtures" / name))


def _load(path: str) -> MachineDescription:
    p = Path(path)
    if not p.exists() and fixture_path(p.name).exists() and p.parent == Path("."):
        p = fixture_path(p.name)
    try:
        return load_machine(p)
    except OSError as exc:
        print(f"error: cannot read {path}: {exc.strerror}", file=sys.stderr)
        raise _Exit(EXIT_PARSE)
    except MachineParseError as exc:
        for d in exc.diagnostics:
            print(f"{path}:{d}", file=sys.stderr)
        raise _Exit(EXIT_PARSE)


def _require(m: MachineDescription, kind: Kind, hint: str) -> None:
    if m.kind is not kind:
        print(f"error: this command needs a {kind.value} machine, got {m.kind.value}; {hint}",
              file=sys.stderr)
        raise _Exit(EXIT_WRONG_KIND)


def _hint(m: MachineDescription) -> str:
    return {Kind.DETERMINISTIC: "use 'run'", Kind.PROBABILISTIC: "use 'dist' or 'sample'",
            Kind.QUANTUM: "use 'amps'"}[m.kind]


def fmt_real(x: float, digits: int = 12) -> str:
    return format(float(x) + 0.0, f".{digits}g")


def fmt_weight(w, digits: int = 12) -> str:
    if isinstance(w, complex):
        im = w.imag + 0.0
        sign = "-" if im < 0 else "+"
        return f"{fmt_real(w.real, digits)}{sign}{fmt_real(abs(im), digits)}i"
    return fmt_real(w, digits)


def tape_text(c: Configuration, blank: str) -> str:
    return format_symbols(c.window(blank))


def format_records(ws: WeightedState) -> str:
    """Tab-separated records, one per configuration, with a header line."""
    lines = ["\t".join(RECORD_FIELDS)]
    for c, w in ws.ranked():
        w = complex(w)
        lines.append("\t".join([c.state, str(c.head), tape_text(c, ws.blank),
                                fmt_real(w.real, 17), fmt_real(w.imag, 17), fmt_real(ws.probability(c), 17)]))
    return "\n".join(lines) + "\n"


def format_table(ws: WeightedState) -> str:
    rows = [("state", "head", "tape", "weight", "prob")]
    for c, w in ws.ranked():
        rows.append((c.state, str(c.head), tape_text(c, ws.blank), fmt_weight(w), fmt_real(ws.probability(c))))
    widths = [max(len(r[i]) for r in rows) for i in range(5)]
    out = ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(r)).rstrip() for r in rows]
    out.append(f"total probability {fmt_real(ws.total())}")
    return "\n".join(out) + "\n"


def cmd_validate(args) -> int:
    m = _load(args.file)
    probes = args.probe if args.probe is not None else ["0", "1", ""]
    report = validate(m, probes, args.depth)
    if m.kind is Kind.PROBABILISTIC:
        for (q, s), total in sorted(report.sums.items()):
            print(f"({q}, {s}): outgoing probability {fmt_real(total)}")
    elif m.kind is Kind.QUANTUM:
        print(f"checked {report.columns_checked} configurations to depth {args.depth}")
    for line in report.failures:
        print(f"FAIL {line}")
    print("valid" if report.passed else "invalid")
    return EXIT_OK if report.passed else EXIT_INVALID


def cmd_run(args) -> int:
    m = _load(args.file)
    _require(m, Kind.DETERMINISTIC, _hint(m))
    out = run_deterministic(m, args.input, args.max_steps)
    noun = "step" if out.steps == 1 else "steps"
    label = {"halted": "halted", "stuck": "stuck", "step-limit": "step limit reached"}[out.status]
    print(f"{label} after {out.steps} {noun}")
    print(f"state: {out.final.state}")
    print(f"head: {out.final.head}")
    print(f"tape: {tape_text(out.final, m.blank)}")
    return {"halted": EXIT_OK, "stuck": EXIT_STUCK, "step-limit": EXIT_STEP_LIMIT}[out.status]


def _weighted(args, kind: Kind) -> int:
    m = _load(args.file)
    _require(m, kind, _hint(m))
    try:
        ws = evolve(m, args.input, args.steps)
    except ValidationFailed as exc:
        for line in exc.report.failures:
            print(f"FAIL {line}", file=sys.stderr)
        return EXIT_INVALID
    sys.stdout.write(format_records(ws) if args.format == "records" else format_table(ws))
    return EXIT_OK


def cmd_dist(args) -> int:
    return _weighted(args, Kind.PROBABILISTIC)


def cmd_amps(args) -> int:
    return _weighted(args, Kind.QUANTUM)


def cmd_paths(args) -> int:
    m = _load(args.file)
    code = EXIT_OK
    try:
        paths = enumerate_paths(m, args.input, args.steps, args.max_paths)
    except PathBudgetExceeded as exc:
        paths, code = exc.paths, EXIT_BUDGET
    for i, p in enumerate(paths):
        trail = " ; ".join(str(r) if r is not None else "(stay)" for r, _ in p.steps) or "(root)"
        print(f"path {i}: weight {fmt_weight(p.weight)}  {trail}  => {tape_text(p.final, m.blank)}")
    if code == EXIT_BUDGET:
        print(f"truncated: more than {args.max_paths} paths")
        return code
    print(f"{len(paths)} paths")
    print("aggregate:")
    sys.stdout.write(format_table(aggregate_paths(paths, m.blank)))
    return code


def _parse_table(text: str) -> BooleanFunctionTable:
    values = [int(v) for v in text.split(",")]
    if len(values) != 2 or any(v not in (0, 1) for v in values):
        raise ValueError("expected two comma-separated bits")
    return BooleanFunctionTable(1, 1, tuple(values))


def cmd_deutsch(args) -> int:
    try:
        f = _parse_table(args.f)
    except ValueError as exc:
        print(f"error: --f {args.f!r}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    rep = deutsch_decide(f)
    print(f"f(0)={f.values[0]} f(1)={f.values[1]}")
    print(f"P(output 0) = {fmt_real(rep.p0)}")
    print(f"P(output 1) = {fmt_real(rep.p1)}")
    print(f"verdict: {rep.verdict}")
    print(f"oracle calls: {rep.oracle_calls}")
    return EXIT_OK


def cmd_sample(args) -> int:
    m = _load(args.file)
    _require(m, Kind.PROBABILISTIC, _hint(m))
    if args.trials == 1:
        out = sample_run(m, args.input, args.max_steps, args.seed)
        for i, c in enumerate(out.trajectory):
            rule = f"  via {out.rules[i - 1]}" if i else ""
            print(f"step {i}: {c.describe(m.blank)}{rule}")
        print(f"{out.status} after {out.steps} steps, tape {tape_text(out.final, m.blank)}")
        return EXIT_OK
    counts = sample_outcomes(m, args.input, args.max_steps, args.seed, args.trials)
    print("status\ttape\tcount\tfreq")
    for (status, tape), n in sorted(counts.items()):
        print(f"{status}\t{tape}\t{n}\t{fmt_real(n / args.trials)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qtmsim", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a machine file for its kind")
    p.add_argument("file")
    p.add_argument("--probe", action="append", help="probe input for quantum machines (repeatable)")
    p.add_argument("--depth", type=int, default=4)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="run a deterministic machine")
    p.add_argument("file")
    p.add_argument("--input", default="")
    p.add_argument("--max-steps", type=int, default=1000)
    p.set_defaults(func=cmd_run)

    for name, func, what in (("dist", cmd_dist, "probability distribution"),
                             ("amps", cmd_amps, "amplitudes")):
        p = sub.add_parser(name, help=f"{what} after a number of steps")
        p.add_argument("file")
        p.add_argument("--input", default="")
        p.add_argument("--steps", type=int, default=1)
        p.add_argument("--format", choices=("table", "records"), default="table")
        p.set_defaults(func=func)

    p = sub.add_parser("paths", help="enumerate computation paths")
    p.add_argument("file")
    p.add_argument("--input", default="")
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--max-paths", type=int, default=10**6)
    p.set_defaults(func=cmd_paths)

    p = sub.add_parser("deutsch", help="Deutsch's problem with one oracle call")
    p.add_argument("--f", required=True, help="function table f(0),f(1), e.g. 0,1")
    p.set_defaults(func=cmd_deutsch)

    p = sub.add_parser("sample", help="sample runs of a probabilistic machine")
    p.add_argument("file")
    p.add_argument("--input", default="")
    p.add_argument("--max-steps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1)
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except _Exit as exc:
        return exc.code
    except UnknownSymbol as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())

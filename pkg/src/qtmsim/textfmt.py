"""Reader and writer for ``.qtm`` machine files.

Example::

    kind: quantum
    alphabet: 0 1 _
    blank: _
    states: q0 qh
    start: q0
    halt: qh
    rule: q0 0 -> qh 0 N (0, 1/sqrt(2))
    rule: q0 0 -> qh 1 N (1/sqrt(2), 0)

``#`` starts a comment. Headers come before rules, each exactly once
(``format: 1`` is optional). Deterministic rules carry no weight,
probabilistic rules a real, quantum rules a ``(re, im)`` pair.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import MachineError, MachineParseError
from .machine import Direction, Kind, MachineDescription, build_machine

HEADERS = ("kind", "alphabet", "blank", "states", "start", "halt")

_LINE = re.compile(r"^\s*([A-Za-z_]\w*)\s*:(.*)$")
_RULE = re.compile(r"^\s*(\S+)\s+(\S+)\s*->\s*(\S+)\s+(\S+)\s+(\S+)(?:\s+(\S.*?))?\s*$")
_DECIMAL = re.compile(r"^[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?$")
_SQRT = re.compile(r"^([+-]?)1/sqrt\(2\)$")
_COMPLEX = re.compile(r"^\(\s*([^,\s]+)\s*,\s*([^,\s]+)\s*\)$")


@dataclass(frozen=True)
class SourceDiagnostic:
    line: int
    column: int
    message: str
    severity: str = "error"

    def __str__(self):
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


class _Diag(Exception):
    def __init__(self, column, message):
        super().__init__(message)
        self.column = column
        self.message = message


def parse_real(token: str) -> float:
    """A decimal literal or ``[+-]1/sqrt(2)``; raises ``ValueError`` otherwise."""
    token = token.strip()
    m = _SQRT.match(token)
    if m:
        value = 1 / math.sqrt(2)
        return -value if m.group(1) == "-" else value
    if not _DECIMAL.match(token):
        raise ValueError(f"not a real number: {token!r}")
    return float(token)


def _parse_weight(kind: Kind, text: str | None, col: int):
    if kind is Kind.DETERMINISTIC:
        if text is not None:
            raise _Diag(col, "deterministic rules take no weight")
        return None
    if text is None:
        raise _Diag(col, f"{kind.value} rule needs a weight")
    if kind is Kind.PROBABILISTIC:
        if text.startswith("("):
            raise _Diag(col, "probabilistic weight must be a real, not a complex pair")
        try:
            w = parse_real(text)
        except ValueError as exc:
            raise _Diag(col, str(exc)) from None
        if not 0.0 <= w <= 1.0:
            raise _Diag(col, f"weight out of range [0,1]: {text}")
        return w
    m = _COMPLEX.match(text)
    if not m:
        raise _Diag(col, f"quantum weight must be a (re, im) pair, got {text!r}")
    try:
        return complex(parse_real(m.group(1)), parse_real(m.group(2)))
    except ValueError as exc:
        raise _Diag(col, str(exc)) from None


def parse_machine_with_diagnostics(text: str) -> tuple[MachineDescription | None, list[SourceDiagnostic]]:
    """Parse ``text``; return the machine (or ``None``) and every diagnostic.

    Parsing continues past errors. Each malformed line contributes exactly
    one error diagnostic.
    """
    diags: list[SourceDiagnostic] = []
    headers: dict[str, tuple[str, int]] = {}
    rule_lines: list[tuple[int, str, int]] = []

    def error(line, col, msg, severity="error"):
        diags.append(SourceDiagnostic(line, max(col, 1), msg, severity))

    for lineno, raw in enumerate(text.split("\n"), start=1):
        raw = raw.rstrip("\r")
        bad = next((i for i, ch in enumerate(raw) if ord(ch) > 127), None)
        if bad is not None:
            error(lineno, bad + 1, "non-ASCII character")
            continue
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _LINE.match(line)
        if not m:
            error(lineno, len(line) - len(line.lstrip()) + 1, "expected 'key: value'")
            continue
        key, value = m.group(1), m.group(2)
        value_col = m.start(2) + 1 + (len(value) - len(value.lstrip()))
        if key == "rule":
            rule_lines.append((lineno, value, m.start(2)))
            continue
        if key not in HEADERS and key != "format":
            error(lineno, m.start(1) + 1, f"unknown header {key!r}")
        elif rule_lines:
            error(lineno, m.start(1) + 1, f"header {key!r} after the first rule")
        elif key in headers:
            error(lineno, m.start(1) + 1, f"duplicate header {key!r} (first on line {headers[key][1]})")
        elif key == "format" and value.strip() != "1":
            error(lineno, value_col, f"unsupported format version {value.strip()!r}")
        else:
            headers[key] = (value.strip(), lineno)
            if key in ("blank", "start", "halt", "kind") and len(value.split()) != 1:
                error(lineno, value_col, f"header {key!r} takes exactly one value")

    for key in HEADERS:
        if key not in headers:
            error(1, 1, f"missing header {key!r}")

    kind = None
    if "kind" in headers:
        try:
            kind = Kind(headers["kind"][0])
        except ValueError:
            value, line = headers["kind"]
            error(line, 1, f"unknown kind {value!r}")
    alphabet = headers.get("alphabet", ("", 0))[0].split()
    states = headers.get("states", ("", 0))[0].split()
    for key, names in (("alphabet", alphabet), ("states", states)):
        if key in headers:
            dupes = sorted({n for n in names if names.count(n) > 1})
            if dupes:
                error(headers[key][1], 1, f"{key} lists {dupes[0]!r} more than once")
            elif not names:
                error(headers[key][1], 1, f"{key} is empty")
    blank = headers.get("blank", ("_", 0))[0]
    if "blank" in headers and blank not in alphabet:
        error(headers["blank"][1], 1, f"blank {blank!r} is not in the alphabet")
    for key in ("start", "halt"):
        if key in headers and headers[key][0] not in states:
            error(headers[key][1], 1, f"{key} state {headers[key][0]!r} is not declared")

    sigma, q = set(alphabet), set(states)
    halt = headers.get("halt", ("", 0))[0]
    rules = []
    seen: dict[tuple, int] = {}
    seen_det: dict[tuple, int] = {}
    for lineno, body, offset in rule_lines:
        try:
            m = _RULE.match(body)
            if not m:
                raise _Diag(offset + 1, "rule must read '<q> <s> -> <q2> <s2> <L|R|N> [weight]'")
            col = [offset + m.start(i) + 1 for i in range(1, 7)]
            src, sym, dst, out, move, weight = m.groups()
            for i, name in ((0, src), (2, dst)):
                if name not in q:
                    raise _Diag(col[i], f"undeclared state {name!r}")
            for i, name in ((1, sym), (3, out)):
                if name not in sigma:
                    raise _Diag(col[i], f"undeclared symbol {name!r}")
            if move not in ("L", "R", "N"):
                raise _Diag(col[4], f"direction must be L, R or N, got {move!r}")
            if src == halt:
                raise _Diag(col[0], "the halt state cannot have outgoing rules")
            w = _parse_weight(kind, weight, col[5]) if kind is not None else None
            key = (src, sym, dst, out, move)
            if key in seen:
                raise _Diag(col[0], f"duplicate rule (first on line {seen[key]})")
            if kind is Kind.DETERMINISTIC and (src, sym) in seen_det:
                raise _Diag(col[0], f"second rule for ({src}, {sym}) in a deterministic machine"
                                    f" (first on line {seen_det[src, sym]})")
        except _Diag as d:
            error(lineno, d.column, d.message)
            continue
        seen[key] = lineno
        seen_det.setdefault((src, sym), lineno)
        if w is not None and w == 0:
            error(lineno, col[5], "rule has zero weight", "warning")
        rules.append((src, sym, dst, out, Direction(move), w))

    if any(d.severity == "error" for d in diags):
        return None, diags
    try:
        machine = build_machine(kind, alphabet, states, headers["start"][0], halt, rules, blank=blank)
    except MachineError as exc:
        # all structural checks above should have caught this already
        error(1, 1, str(exc))
        return None, diags
    return machine, diags


def parse_machine(text: str) -> MachineDescription:
    """Parse a ``.qtm`` document or raise :class:`MachineParseError`."""
    machine, diags = parse_machine_with_diagnostics(text)
    if machine is None:
        raise MachineParseError(diags)
    return machine


def load_machine(path) -> MachineDescription:
    with open(path, encoding="ascii", errors="replace", newline="") as fh:
        return parse_machine(fh.read())


def _real(x: float) -> str:
    return format(x, ".17g")


def serialize_machine(m: MachineDescription) -> str:
    lines = [
        "format: 1",
        f"kind: {m.kind.value}",
        f"alphabet: {' '.join(m.alphabet)}",
        f"blank: {m.blank}",
        f"states: {' '.join(m.states)}",
        f"start: {m.start}",
        f"halt: {m.halt}",
    ]
    for r in m.rules:
        line = f"rule: {r}"
        if m.kind is Kind.PROBABILISTIC:
            line += f" {_real(r.weight)}"
        elif m.kind is Kind.QUANTUM:
            line += f" ({_real(r.weight.real)}, {_real(r.weight.imag)})"
        lines.append(line)
    return "\n".join(lines) + "\n"

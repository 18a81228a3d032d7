"""Machine descriptions, configurations and weighted states.

A single weighted-transition representation covers all three machine kinds.
Every rule is a quintuple ``(q, s, q', s', d)`` plus a weight: implicitly 1
for deterministic machines, a probability for probabilistic ones and a
complex amplitude for quantum ones.
"""
from __future__ import annotations

import cmath
import enum
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import (
    DepthZero,
    DeterministicConflict,
    DuplicateName,
    DuplicateQuintuple,
    HaltHasOutgoingRule,
    InvalidWeight,
    UnknownState,
    UnknownSymbol,
    WrongKind,
)

#: Tolerance for every normalization and unitarity check.
EPS_NORM = 1e-9
#: Weights with smaller magnitude are dropped after each aggregation.
PRUNE_THRESHOLD = 1e-12


class Kind(str, enum.Enum):
    DETERMINISTIC = "deterministic"
    PROBABILISTIC = "probabilistic"
    QUANTUM = "quantum"


class Direction(str, enum.Enum):
    LEFT = "L"
    NOTHING = "N"
    RIGHT = "R"

    @property
    def offset(self) -> int:
        return {"L": -1, "N": 0, "R": 1}[self.value]


@dataclass(frozen=True, order=True)
class TransitionRule:
    source: str
    read: str
    target: str
    write: str
    move: Direction
    weight: complex | float = 1.0

    @property
    def quintuple(self) -> tuple[str, str, str, str, Direction]:
        return (self.source, self.read, self.target, self.write, self.move)

    def __str__(self) -> str:
        return f"{self.source} {self.read} -> {self.target} {self.write} {self.move.value}"


@dataclass(frozen=True)
class Configuration:
    """Immutable machine snapshot.

    ``tape`` holds ``(cell, symbol)`` pairs sorted by cell with blanks left
    out, so two configurations are equal exactly when they describe the same
    tape, head position and state.
    """

    tape: tuple[tuple[int, str], ...]
    head: int
    state: str

    @classmethod
    def from_mapping(cls, tape: Mapping[int, str], head: int, state: str, blank: str) -> Configuration:
        cells = tuple(sorted((int(i), s) for i, s in tape.items() if s != blank))
        return cls(cells, int(head), state)

    def sort_key(self):
        return (self.state, self.head, self.tape)

    def read(self, cell: int, blank: str) -> str:
        for i, s in self.tape:
            if i == cell:
                return s
        return blank

    def window(self, blank: str) -> list[str]:
        """Symbols from the leftmost to the rightmost non-blank cell, padded by
        one blank on each side. An empty tape gives a single blank."""
        if not self.tape:
            return [blank]
        cells = dict(self.tape)
        lo, hi = self.tape[0][0], self.tape[-1][0]
        return [cells.get(i, blank) for i in range(lo - 1, hi + 2)]

    def describe(self, blank: str) -> str:
        return f"({self.state}, head={self.head}, tape={format_symbols(self.window(blank))})"


def format_symbols(symbols: Sequence[str]) -> str:
    if all(len(s) == 1 for s in symbols):
        return "".join(symbols)
    return " ".join(symbols)


def _coerce_weight(kind: Kind, weight, rule_text: str) -> complex | float:
    if kind is Kind.DETERMINISTIC:
        if weight is None or weight == 1:
            return 1.0
        raise InvalidWeight(f"deterministic rule {rule_text} must have weight 1, got {weight!r}")
    if weight is None:
        raise InvalidWeight(f"{kind.value} rule {rule_text} needs an explicit weight")
    if kind is Kind.PROBABILISTIC:
        if isinstance(weight, complex):
            if weight.imag != 0:
                raise InvalidWeight(f"probability for {rule_text} must be real, got {weight!r}")
            weight = weight.real
        w = float(weight)
        if not (0.0 <= w <= 1.0):
            raise InvalidWeight(f"probability for {rule_text} out of range [0,1]: {w!r}")
        return w
    w = complex(weight)
    if not cmath.isfinite(w):
        raise InvalidWeight(f"amplitude for {rule_text} is not finite: {w!r}")
    return w


@dataclass(frozen=True)
class MachineDescription:
    kind: Kind
    alphabet: tuple[str, ...]
    blank: str
    states: tuple[str, ...]
    start: str
    halt: str
    rules: tuple[TransitionRule, ...]
    _table: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        table = defaultdict(list)
        for rule in self.rules:
            table[rule.source, rule.read].append(rule)
        object.__setattr__(self, "_table", {k: tuple(v) for k, v in table.items()})

    def rules_for(self, state: str, symbol: str) -> tuple[TransitionRule, ...]:
        return self._table.get((state, symbol), ())

    def scanned(self, config: Configuration) -> str:
        return config.read(config.head, self.blank)

    def status(self, config: Configuration) -> str:
        """``"halted"``, ``"stuck"`` or ``"active"``."""
        if config.state == self.halt:
            return "halted"
        if not self.rules_for(config.state, self.scanned(config)):
            return "stuck"
        return "active"

    def apply(self, rule: TransitionRule, config: Configuration) -> Configuration:
        cells = dict(config.tape)
        if rule.write == self.blank:
            cells.pop(config.head, None)
        else:
            cells[config.head] = rule.write
        return Configuration(tuple(sorted(cells.items())), config.head + rule.move.offset, rule.target)

    def successors(self, config: Configuration) -> list[tuple[TransitionRule, Configuration]]:
        """Applicable rules in canonical order, each with its resulting configuration."""
        if config.state == self.halt:
            return []
        return [(r, self.apply(r, config)) for r in self.rules_for(config.state, self.scanned(config))]

    def components(self) -> dict:
        return dict(
            kind=self.kind,
            alphabet=self.alphabet,
            blank=self.blank,
            states=self.states,
            start=self.start,
            halt=self.halt,
            rules=self.rules,
        )

    def retag(self, kind: Kind | str) -> MachineDescription:
        """Same rule table under another kind, every weight set to 1."""
        kind = Kind(kind)
        rules = [(r.source, r.read, r.target, r.write, r.move, None if kind is Kind.DETERMINISTIC else 1.0)
                 for r in self.rules]
        return build_machine(kind, self.alphabet, self.states, self.start, self.halt, rules, blank=self.blank)


def _check_distinct(names: Sequence[str], what: str) -> None:
    seen = set()
    for n in names:
        if n in seen:
            raise DuplicateName(f"{what} {n!r} declared twice")
        seen.add(n)


def build_machine(kind, alphabet, states, start, halt, rules, blank: str = "_") -> MachineDescription:
    """Validate and canonicalize a machine.

    ``rules`` items are either :class:`TransitionRule` instances or tuples
    ``(q, s, q2, s2, d)`` / ``(q, s, q2, s2, d, weight)``. Directions may be
    given as :class:`Direction` or as ``"L"``, ``"R"``, ``"N"``.
    """
    kind = Kind(kind)
    alphabet = tuple(alphabet)
    states = tuple(states)
    _check_distinct(alphabet, "symbol")
    _check_distinct(states, "state")
    if blank not in alphabet:
        raise UnknownSymbol(f"blank symbol {blank!r} is not in the alphabet")
    for name in (start, halt):
        if name not in states:
            raise UnknownState(f"state {name!r} is not declared")

    sigma, q = set(alphabet), set(states)
    built: dict[tuple, TransitionRule] = {}
    for item in rules:
        if isinstance(item, TransitionRule):
            parts = (*item.quintuple, item.weight)
        else:
            parts = tuple(item) if len(item) == 6 else (*item, None)
        src, sym, dst, out, move, weight = parts
        move = Direction(move.value if isinstance(move, Direction) else move)
        text = f"({src}, {sym}) -> ({dst}, {out}, {move.value})"
        for name in (src, dst):
            if name not in q:
                raise UnknownState(f"rule {text} uses undeclared state {name!r}")
        for name in (sym, out):
            if name not in sigma:
                raise UnknownSymbol(f"rule {text} uses undeclared symbol {name!r}")
        if src == halt:
            raise HaltHasOutgoingRule(f"rule {text} leaves the halt state")
        key = (src, sym, dst, out, move)
        if key in built:
            raise DuplicateQuintuple(f"rule {text} given twice")
        built[key] = TransitionRule(src, sym, dst, out, move, _coerce_weight(kind, weight, text))

    ordered = tuple(sorted(built.values()))
    if kind is Kind.DETERMINISTIC:
        seen: set[tuple[str, str]] = set()
        for r in ordered:
            if (r.source, r.read) in seen:
                raise DeterministicConflict(f"two rules for ({r.source}, {r.read}) in a deterministic machine")
            seen.add((r.source, r.read))
    return MachineDescription(kind, alphabet, blank, states, start, halt, ordered)


def _input_symbols(m: MachineDescription, word) -> list[str]:
    if isinstance(word, str):
        return word.split() if any(ch.isspace() for ch in word) else list(word)
    return list(word)


def initial_configuration(m: MachineDescription, word: str | Sequence[str] = "") -> Configuration:
    """Input written from cell 0, head on cell 0, machine in its start state.

    A string is read one character per symbol unless it contains whitespace,
    in which case it is split on whitespace (for multi-character symbols).
    """
    symbols = _input_symbols(m, word)
    for s in symbols:
        if s not in m.alphabet:
            raise UnknownSymbol(f"input symbol {s!r} is not in the alphabet")
    return Configuration.from_mapping(dict(enumerate(symbols)), 0, m.start, m.blank)


@dataclass
class WeightedState:
    """Finite map from configurations to probabilities or amplitudes."""

    kind: str  # "probability" or "amplitude"
    entries: dict[Configuration, complex | float]
    blank: str = "_"

    def __post_init__(self):
        if self.kind not in ("probability", "amplitude"):
            raise ValueError(f"unknown weighted-state kind {self.kind!r}")
        self.entries = {c: w for c, w in self.entries.items() if abs(w) >= PRUNE_THRESHOLD}

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, config: Configuration):
        return self.entries.get(config, 0.0)

    def probability(self, config: Configuration) -> float:
        w = self.entries.get(config, 0.0)
        return abs(w) ** 2 if self.kind == "amplitude" else float(w)

    def probabilities(self) -> dict[Configuration, float]:
        return {c: self.probability(c) for c in self.entries}

    def total(self) -> float:
        """Total probability (sum of squared moduli for amplitudes)."""
        return math.fsum(self.probabilities().values())

    def check(self) -> list[str]:
        problems = []
        if self.kind == "probability":
            for c, w in self.entries.items():
                if isinstance(w, complex) or not (-EPS_NORM <= w <= 1 + EPS_NORM):
                    problems.append(f"weight {w!r} of {c.describe(self.blank)} outside [0,1]")
        total = self.total()
        if abs(total - 1.0) > EPS_NORM:
            problems.append(f"total probability {total!r} differs from 1")
        return problems

    def ranked(self) -> list[tuple[Configuration, complex | float]]:
        """Entries by descending probability, ties in canonical configuration order."""
        return sorted(self.entries.items(), key=lambda kv: (-self.probability(kv[0]), kv[0].sort_key()))


@dataclass
class ValidationReport:
    passed: bool
    failures: list[str] = field(default_factory=list)
    #: per-(state, symbol) outgoing probability sums (stochastic check)
    sums: dict[tuple[str, str], float] = field(default_factory=dict)
    #: columns whose squared norm is off (norm-preservation check)
    bad_norms: list[tuple[Configuration, float]] = field(default_factory=list)
    #: column pairs with a non-zero inner product (norm-preservation check)
    bad_pairs: list[tuple[Configuration, Configuration, float]] = field(default_factory=list)
    columns_checked: int = 0

    def __bool__(self):
        return self.passed


def validate_stochastic(m: MachineDescription) -> ValidationReport:
    if m.kind is not Kind.PROBABILISTIC:
        raise WrongKind(f"stochasticity applies to probabilistic machines, not {m.kind.value}")
    sums: dict[tuple[str, str], float] = {}
    for (q, s), rules in m._table.items():
        sums[q, s] = math.fsum(r.weight for r in rules)
    failures = [
        f"outgoing probabilities of ({q}, {s}) sum to {total!r}"
        for (q, s), total in sorted(sums.items())
        if abs(total - 1.0) > EPS_NORM
    ]
    return ValidationReport(not failures, failures, sums=sums)


def _column(m: MachineDescription, config: Configuration) -> dict[Configuration, complex]:
    succ = m.successors(config)
    if not succ:
        return {config: 1.0 + 0j}
    col: dict[Configuration, complex] = defaultdict(complex)
    for rule, nxt in succ:
        col[nxt] += rule.weight
    return col


def validate_norm_preserving(m: MachineDescription, probe_inputs: Iterable, depth: int) -> ValidationReport:
    """Numerically check that one step of ``m`` preserves the 2-norm.

    Starting from the probe inputs, the configurations that can carry
    amplitude at step ``t`` form a layer. For every layer before ``depth``
    the images of its configurations (halted and stuck ones map to
    themselves) must be unit vectors and pairwise orthogonal. Passing
    guarantees that evolving any superposition of the probe inputs for up to
    ``depth`` steps keeps the total probability at 1.
    """
    if m.kind is not Kind.QUANTUM:
        raise WrongKind(f"norm preservation applies to quantum machines, not {m.kind.value}")
    if depth < 1:
        raise DepthZero("depth must be a positive integer")

    layer = {initial_configuration(m, w) for w in probe_inputs}
    report = ValidationReport(True)
    seen_norms: set[Configuration] = set()
    seen_pairs: set[tuple[Configuration, Configuration]] = set()
    checked: set[Configuration] = set()

    for _ in range(depth):
        configs = sorted(layer, key=Configuration.sort_key)
        columns = [_column(m, c) for c in configs]
        checked.update(configs)
        by_target: dict[Configuration, list[tuple[int, complex]]] = defaultdict(list)
        for j, col in enumerate(columns):
            norm = math.fsum(abs(a) ** 2 for a in col.values())
            if abs(norm - 1.0) > EPS_NORM and configs[j] not in seen_norms:
                seen_norms.add(configs[j])
                report.bad_norms.append((configs[j], norm))
                report.failures.append(f"column {configs[j].describe(m.blank)} has squared norm {norm!r}")
            for target, amp in col.items():
                by_target[target].append((j, amp))
        gram: dict[tuple[int, int], complex] = defaultdict(complex)
        for entries in by_target.values():
            for a in range(len(entries)):
                i, ai = entries[a]
                for b in range(a + 1, len(entries)):
                    j, aj = entries[b]
                    gram[i, j] += ai.conjugate() * aj
        for (i, j), value in sorted(gram.items()):
            key = (configs[i], configs[j])
            if abs(value) >= EPS_NORM and key not in seen_pairs:
                seen_pairs.add(key)
                report.bad_pairs.append((configs[i], configs[j], abs(value)))
                report.failures.append(
                    f"columns {configs[i].describe(m.blank)} and {configs[j].describe(m.blank)}"
                    f" have inner product modulus {abs(value)!r}"
                )
        layer = {t for col in columns for t, a in col.items() if abs(a) >= PRUNE_THRESHOLD}

    report.columns_checked = len(checked)
    report.passed = not report.failures
    return report


def validate(m: MachineDescription, probe_inputs: Iterable = ("0", "1", ""), depth: int = 4) -> ValidationReport:
    """Run the check appropriate for the machine's kind."""
    if m.kind is Kind.PROBABILISTIC:
        return validate_stochastic(m)
    if m.kind is Kind.QUANTUM:
        probes = [w for w in probe_inputs if all(s in m.alphabet for s in _input_symbols(m, w))]
        return validate_norm_preserving(m, probes, depth)
    return ValidationReport(True)

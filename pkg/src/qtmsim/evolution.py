"""Running machines: deterministic runs, level-wise evolution, path
enumeration and single-path sampling."""
from __future__ import annotations

import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .errors import MixedRoots, PathBudgetExceeded, ValidationFailed, WrongKind
from .machine import (
    Configuration,
    Kind,
    MachineDescription,
    TransitionRule,
    WeightedState,
    format_symbols,
    initial_configuration,
    validate_norm_preserving,
    validate_stochastic,
)

DEFAULT_MAX_PATHS = 10**6


@dataclass(frozen=True)
class RunOutcome:
    status: str  # "halted", "stuck" or "step-limit"
    final: Configuration
    steps: int
    trajectory: tuple[Configuration, ...] = ()
    rules: tuple[TransitionRule, ...] = ()


@dataclass(frozen=True)
class PathRecord:
    """One root-to-leaf branch of the computation tree.

    ``steps`` pairs each applied rule with the configuration it produced;
    the rule is ``None`` where a halted or stuck branch is padded.
    """

    root: Configuration
    steps: tuple[tuple[TransitionRule | None, Configuration], ...]
    weight: complex | float
    kind: Kind = field(default=Kind.QUANTUM, compare=False)
    indices: tuple[int, ...] = ()

    @property
    def final(self) -> Configuration:
        return self.steps[-1][1] if self.steps else self.root

    def recompute_weight(self) -> complex | float:
        w = 1.0 + 0j if self.kind is Kind.QUANTUM else 1.0
        for rule, _ in self.steps:
            if rule is not None:
                w *= rule.weight
        return w


def _state_kind(m: MachineDescription) -> str:
    return "amplitude" if m.kind is Kind.QUANTUM else "probability"


def _unit(m: MachineDescription):
    return 1.0 + 0j if m.kind is Kind.QUANTUM else 1.0


def run_deterministic(m: MachineDescription, word="", max_steps: int = 10_000) -> RunOutcome:
    if m.kind is not Kind.DETERMINISTIC:
        raise WrongKind(f"run_deterministic needs a deterministic machine, got {m.kind.value}")
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    config = initial_configuration(m, word)
    trajectory = [config]
    applied = []
    for steps in range(max_steps + 1):
        if config.state == m.halt:
            return RunOutcome("halted", config, steps, tuple(trajectory), tuple(applied))
        succ = m.successors(config)
        if not succ:
            return RunOutcome("stuck", config, steps, tuple(trajectory), tuple(applied))
        if steps == max_steps:
            break
        rule, config = succ[0]
        applied.append(rule)
        trajectory.append(config)
    return RunOutcome("step-limit", config, max_steps, tuple(trajectory), tuple(applied))


def _check_machine(m: MachineDescription, word, steps: int) -> None:
    if m.kind is Kind.PROBABILISTIC:
        report = validate_stochastic(m)
    elif steps > 0:
        report = validate_norm_preserving(m, [word], steps)
    else:
        return
    if not report.passed:
        raise ValidationFailed(report)


def iter_evolve(m: MachineDescription, word="", steps: int = 1, *, check: bool = True):
    """Yield the weighted state after 0, 1, ..., ``steps`` steps.

    See :func:`evolve`; this is the same computation exposing every level.
    """
    if m.kind is Kind.DETERMINISTIC:
        raise WrongKind("evolve needs a probabilistic or quantum machine; use run_deterministic")
    if steps < 0:
        raise ValueError("steps must be >= 0")
    if check:
        _check_machine(m, word, steps)

    kind = _state_kind(m)
    current = WeightedState(kind, {initial_configuration(m, word): _unit(m)}, m.blank)
    yield current
    for _ in range(steps):
        nxt: dict[Configuration, complex | float] = defaultdict(complex if kind == "amplitude" else float)
        for config in sorted(current.entries, key=Configuration.sort_key):
            weight = current.entries[config]
            succ = m.successors(config)
            if not succ:
                nxt[config] += weight
                continue
            for rule, target in succ:
                nxt[target] += weight * rule.weight
        current = WeightedState(kind, dict(nxt), m.blank)
        yield current


def evolve(m: MachineDescription, word="", steps: int = 1, *, check: bool = True) -> WeightedState:
    """Distribution (probabilistic) or amplitude vector (quantum) after ``steps`` steps.

    Contributions landing on the same configuration are summed before the
    next step, which is what lets amplitudes interfere. Halted and stuck
    configurations keep their weight. With ``check`` the machine is first
    validated for its kind (for quantum machines, on this input and depth)
    and :class:`ValidationFailed` is raised if it does not pass.
    """
    for current in iter_evolve(m, word, steps, check=check):
        pass
    return current


def enumerate_paths(m: MachineDescription, word="", steps: int = 1,
                    max_paths: int = DEFAULT_MAX_PATHS) -> list[PathRecord]:
    """Every depth-``steps`` branch of the (unmerged) computation tree.

    Paths come in lexicographic order of the rule indices chosen at each
    node. Halted and stuck branches are padded with self-loops of weight 1.
    Raises :class:`PathBudgetExceeded`, carrying the first ``max_paths``
    paths, when there are more.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    root = initial_configuration(m, word)
    unit = _unit(m)
    paths: list[PathRecord] = []
    # explicit stack keeps lexicographic order without recursion limits
    stack = [(root, (), unit, ())]
    while stack:
        config, trail, weight, idx = stack.pop()
        if len(trail) == steps:
            if len(paths) == max_paths:
                raise PathBudgetExceeded(paths, max_paths)
            paths.append(PathRecord(root, trail, weight, m.kind, idx))
            continue
        succ = m.successors(config)
        if not succ:
            stack.append((config, trail + ((None, config),), weight, idx + (0,)))
            continue
        for i in reversed(range(len(succ))):
            rule, target = succ[i]
            stack.append((target, trail + ((rule, target),), weight * rule.weight, idx + (i,)))
    return paths


def aggregate_paths(paths: list[PathRecord], blank: str = "_") -> WeightedState:
    """Sum path weights per final configuration, in the order given."""
    if not paths:
        raise ValueError("no paths to aggregate")
    root, length, kind = paths[0].root, len(paths[0].steps), paths[0].kind
    sums: dict[Configuration, complex | float] = {}
    for p in paths:
        if p.root != root:
            raise MixedRoots("paths start from different configurations")
        if len(p.steps) != length:
            raise MixedRoots("paths have different lengths")
        sums[p.final] = sums.get(p.final, 0) + p.weight
    return WeightedState("amplitude" if kind is Kind.QUANTUM else "probability", sums, blank)


def classical_path_probabilities(paths: list[PathRecord]) -> dict[Configuration, float]:
    """Sum of squared path weights per final configuration.

    This is what adding probabilities instead of amplitudes would predict;
    comparing it with :func:`aggregate_paths` exposes interference.
    """
    out: dict[Configuration, float] = defaultdict(float)
    for p in paths:
        out[p.final] += abs(p.weight) ** 2
    return dict(out)


def _region_cells(region) -> range:
    if isinstance(region, range):
        return region
    lo, hi = region
    return range(lo, hi + 1)


def output_probability(ws: WeightedState, region, pattern) -> float:
    """Probability that the tape reads ``pattern`` on ``region``.

    ``region`` is an inclusive ``(first, last)`` cell pair or a ``range``.
    """
    cells = _region_cells(region)
    symbols = list(pattern)
    if len(cells) != len(symbols):
        raise ValueError(f"region has {len(cells)} cells but pattern has {len(symbols)} symbols")
    probs = [
        p for c, p in ws.probabilities().items()
        if all(c.read(i, ws.blank) == s for i, s in zip(cells, symbols))
    ]
    return sum(sorted(probs))


def sample_run(m: MachineDescription, word="", max_steps: int = 10_000,
               seed: int | random.Random = 0) -> RunOutcome:
    """Follow one randomly chosen path of a probabilistic machine.

    ``seed`` is an integer or an existing :class:`random.Random`; the same
    seed always gives the same trajectory. At each node a uniform draw is
    inverted against the cumulative weights of the rules in canonical order.
    """
    if m.kind is not Kind.PROBABILISTIC:
        raise WrongKind(f"sample_run needs a probabilistic machine, got {m.kind.value}")
    report = validate_stochastic(m)
    if not report.passed:
        raise ValidationFailed(report)
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)

    config = initial_configuration(m, word)
    trajectory = [config]
    applied = []
    for steps in range(max_steps + 1):
        if config.state == m.halt:
            return RunOutcome("halted", config, steps, tuple(trajectory), tuple(applied))
        succ = m.successors(config)
        if not succ:
            return RunOutcome("stuck", config, steps, tuple(trajectory), tuple(applied))
        if steps == max_steps:
            break
        u = rng.random()
        acc = 0.0
        chosen = None
        for rule, target in succ:
            if rule.weight <= 0:
                continue
            chosen = (rule, target)
            acc += rule.weight
            if u < acc:
                break
        rule, config = chosen
        applied.append(rule)
        trajectory.append(config)
    return RunOutcome("step-limit", config, max_steps, tuple(trajectory), tuple(applied))


def sample_outcomes(m: MachineDescription, word="", max_steps: int = 10_000,
                    seed: int = 0, trials: int = 1) -> Counter:
    """Counts of ``(status, tape window)`` over ``trials`` sampled runs.

    All trials draw from one generator seeded with ``seed``.
    """
    rng = random.Random(seed)
    counts: Counter = Counter()
    for _ in range(trials):
        out = sample_run(m, word, max_steps, rng)
        counts[out.status, format_symbols(out.final.window(m.blank))] += 1
    return counts

"""Deterministic, probabilistic and quantum Turing machines under one
weighted-transition model, plus a small amplitude-gate toolkit."""

from .errors import *  # noqa: F401,F403
from .evolution import (
    PathRecord,
    RunOutcome,
    aggregate_paths,
    classical_path_probabilities,
    enumerate_paths,
    evolve,
    iter_evolve,
    output_probability,
    run_deterministic,
    sample_outcomes,
    sample_run,
)
from .gates import (
    BooleanFunctionTable,
    DeutschReport,
    Gate,
    PathState,
    apply,
    bridge_gate_to_machine,
    compose,
    deutsch_decide,
    phase_oracle,
    random_unitary,
    sqrt_not,
)
from .machine import (
    EPS_NORM,
    PRUNE_THRESHOLD,
    Configuration,
    Direction,
    Kind,
    MachineDescription,
    TransitionRule,
    ValidationReport,
    WeightedState,
    build_machine,
    initial_configuration,
    validate,
    validate_norm_preserving,
    validate_stochastic,
)
from .textfmt import SourceDiagnostic, load_machine, parse_machine, parse_machine_with_diagnostics, serialize_machine

__version__ = "0.1.0"

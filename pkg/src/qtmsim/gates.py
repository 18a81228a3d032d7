"""Finite-dimensional amplitude gates over path labels.

Convention: ``gate.matrix[a, b]`` is the amplitude for input path ``a`` to
leave on output path ``b``. States are row vectors, so applying ``g1`` and
then ``g2`` is ``state @ g1 @ g2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NonUnitary, WrongArity
from .machine import EPS_NORM, Kind, MachineDescription, build_machine

_INV_SQRT2 = 1 / math.sqrt(2)


def is_unitary(matrix, tol: float = EPS_NORM) -> bool:
    u = np.asarray(matrix, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    eye = np.eye(u.shape[0])
    return bool(np.max(np.abs(u.conj().T @ u - eye)) < tol and np.max(np.abs(u @ u.conj().T - eye)) < tol)


@dataclass(frozen=True, eq=False)
class Gate:
    matrix: np.ndarray

    def __post_init__(self):
        u = np.array(self.matrix, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] < 1:
            raise DimensionMismatch(f"gate matrix must be square and non-empty, got shape {u.shape}")
        if not is_unitary(u):
            raise NonUnitary("gate matrix is not unitary")
        u.setflags(write=False)
        object.__setattr__(self, "matrix", u)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __getitem__(self, ab):
        return self.matrix[ab]

    @classmethod
    def identity(cls, d: int) -> Gate:
        return cls(np.eye(d))


@dataclass(frozen=True, eq=False)
class PathState:
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex).reshape(-1)
        norm = float(np.sum(np.abs(a) ** 2))
        if abs(norm - 1.0) > EPS_NORM:
            raise ValueError(f"path state has squared norm {norm!r}, expected 1")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @classmethod
    def basis(cls, d: int, k: int) -> PathState:
        a = np.zeros(d, dtype=complex)
        a[k] = 1
        return cls(a)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class BooleanFunctionTable:
    """A function ``{0,1}^n -> {0,1}^m`` listed as ``2**n`` integer values."""

    n: int
    m: int
    values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if self.n < 0 or self.m < 0:
            raise ValueError("n and m must be non-negative")
        if len(self.values) != 2**self.n:
            raise ValueError(f"table needs {2**self.n} values, got {len(self.values)}")
        for v in self.values:
            if not 0 <= v < 2**self.m:
                raise ValueError(f"value {v} does not fit in {self.m} bits")


def sqrt_not() -> Gate:
    """Keeps the bit with amplitude i/sqrt(2), flips it with amplitude 1/sqrt(2)."""
    c = 1j * _INV_SQRT2
    return Gate(np.array([[c, _INV_SQRT2], [_INV_SQRT2, c]]))


def compose(*gates: Gate) -> Gate:
    """Gate equivalent to applying ``gates`` left to right."""
    if not gates:
        raise ValueError("compose needs at least one gate")
    out = gates[0].matrix
    for g in gates[1:]:
        if g.dim != out.shape[0]:
            raise DimensionMismatch(f"cannot compose dimensions {out.shape[0]} and {g.dim}")
        out = out @ g.matrix
    return Gate(out)


def apply(g: Gate, s: PathState) -> PathState:
    if g.dim != s.dim:
        raise DimensionMismatch(f"gate of dimension {g.dim} applied to state of dimension {s.dim}")
    return PathState(s.amplitudes @ g.matrix)


def phase_oracle(f: BooleanFunctionTable) -> Gate:
    """Diagonal gate multiplying path x by exp(2*pi*i*f(x)/2**m)."""
    phases = [np.exp(2j * np.pi * v / 2**f.m) for v in f.values]
    return Gate(np.diag(phases))


class CountingOracle:
    """Hands out the phase-oracle gate and counts how often it is used."""

    def __init__(self, f: BooleanFunctionTable):
        self._gate = phase_oracle(f)
        self.calls = 0

    def gate(self) -> Gate:
        self.calls += 1
        return self._gate


@dataclass(frozen=True)
class DeutschReport:
    verdict: str  # "constant" or "balanced"
    p0: float
    p1: float
    amplitude0: complex
    oracle_calls: int
    amplitudes: tuple[complex, ...] = field(default=(), repr=False)


def deutsch_decide(f: BooleanFunctionTable) -> DeutschReport:
    """Decide constant vs balanced for ``f: {0,1} -> {0,1}`` with one oracle use.

    The circuit is sqrt-not, phase oracle, sqrt-not applied to input 0.
    Output 0 has probability 0 for constant ``f`` and 1 for balanced ``f``.
    """
    if f.n != 1 or f.m != 1:
        raise WrongArity(f"Deutsch's problem needs n = m = 1, got n={f.n}, m={f.m}")
    oracle = CountingOracle(f)
    circuit = compose(sqrt_not(), oracle.gate(), sqrt_not())
    out = apply(circuit, PathState.basis(2, 0))
    p0, p1 = (float(p) for p in out.probabilities())
    verdict = "constant" if p0 < 0.5 else "balanced"
    return DeutschReport(verdict, p0, p1, complex(out.amplitudes[0]), oracle.calls, tuple(out.amplitudes))


def bridge_gate_to_machine(g: Gate) -> MachineDescription:
    """One-step quantum machine whose tape amplitudes reproduce ``g``.

    Symbols ``"0"`` .. ``str(d-1)`` label the paths (``d <= 10``); the rule
    ``(q0, a) -> (qh, b, N)`` carries amplitude ``g[a][b]``. Zero entries get
    no rule.
    """
    if not isinstance(g, Gate):
        g = Gate(g)
    if g.dim > 10:
        raise DimensionMismatch("bridge supports gates of dimension at most 10")
    symbols = [str(k) for k in range(g.dim)]
    rules = [
        ("q0", symbols[a], "qh", symbols[b], "N", complex(g.matrix[a, b]))
        for a in range(g.dim)
        for b in range(g.dim)
        if g.matrix[a, b] != 0
    ]
    return build_machine(Kind.QUANTUM, [*symbols, "_"], ["q0", "qh"], "q0", "qh", rules, blank="_")


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random ``d x d`` unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))

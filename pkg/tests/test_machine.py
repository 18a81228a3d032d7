import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from machinegen import random_machine
from qtmsim import (
    Configuration,
    Direction,
    Kind,
    WeightedState,
    bridge_gate_to_machine,
    build_machine,
    initial_configuration,
    random_unitary,
    validate_norm_preserving,
    validate_stochastic,
)
from qtmsim.errors import (
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

R2 = 1 / math.sqrt(2)
BITS = ["0", "1", "_"]


def coin(p0=0.5, p1=0.5):
    return build_machine("probabilistic", BITS, ["q0", "qh"], "q0", "qh",
                         [("q0", "_", "qh", "0", "N", p0), ("q0", "_", "qh", "1", "N", p1)])


def sqrt_not_machine():
    c = 1j * R2
    rules = [("q0", "0", "qh", "0", "N", c), ("q0", "0", "qh", "1", "N", R2),
             ("q0", "1", "qh", "0", "N", R2), ("q0", "1", "qh", "1", "N", c)]
    return build_machine("quantum", BITS, ["q0", "qh"], "q0", "qh", rules)


class TestBuildMachine:
    def test_write_one(self):
        m = build_machine("deterministic", BITS, ["q0", "qh"], "q0", "qh", [("q0", "_", "qh", "1", "N")])
        assert len(m.rules) == 1
        assert m.rules[0].weight == 1.0
        assert m.rules[0].move is Direction.NOTHING

    def test_sqrt_not(self):
        m = sqrt_not_machine()
        assert m.kind is Kind.QUANTUM
        assert m.rules_for("q0", "0")[0].weight == pytest.approx(1j * R2)

    def test_rules_sorted(self):
        m = build_machine("deterministic", BITS, ["q0", "q1", "qh"], "q0", "qh",
                          [("q1", "0", "qh", "0", "R"), ("q0", "1", "q1", "1", "L"), ("q0", "0", "q1", "0", "N")])
        assert [(r.source, r.read) for r in m.rules] == [("q0", "0"), ("q0", "1"), ("q1", "0")]

    def test_deterministic_conflict(self):
        with pytest.raises(DeterministicConflict):
            build_machine("deterministic", BITS, ["q0", "qh"], "q0", "qh",
                          [("q0", "0", "qh", "0", "N"), ("q0", "0", "qh", "1", "N")])

    @pytest.mark.parametrize("rule, exc", [
        (("q0", "0", "q9", "0", "N"), UnknownState),
        (("q0", "2", "qh", "0", "N"), UnknownSymbol),
        (("qh", "0", "q0", "0", "N"), HaltHasOutgoingRule),
        (("q0", "0", "qh", "0", "N", 0.5), InvalidWeight),
    ])
    def test_bad_rule(self, rule, exc):
        with pytest.raises(exc):
            build_machine("deterministic", BITS, ["q0", "qh"], "q0", "qh", [rule])

    def test_duplicate_quintuple(self):
        with pytest.raises(DuplicateQuintuple):
            build_machine("probabilistic", BITS, ["q0", "qh"], "q0", "qh",
                          [("q0", "0", "qh", "0", "N", 0.5), ("q0", "0", "qh", "0", "N", 0.5)])

    def test_duplicate_names(self):
        with pytest.raises(DuplicateName):
            build_machine("deterministic", ["0", "0", "_"], ["q0", "qh"], "q0", "qh", [])
        with pytest.raises(DuplicateName):
            build_machine("deterministic", BITS, ["q0", "q0", "qh"], "q0", "qh", [])

    def test_blank_and_start_must_be_declared(self):
        with pytest.raises(UnknownSymbol):
            build_machine("deterministic", ["0", "1"], ["q0", "qh"], "q0", "qh", [])
        with pytest.raises(UnknownState):
            build_machine("deterministic", BITS, ["q0", "qh"], "qs", "qh", [])

    @pytest.mark.parametrize("w", [1.5, -0.1, float("nan"), 0.5 + 0.5j])
    def test_probability_out_of_range(self, w):
        with pytest.raises(InvalidWeight):
            build_machine("probabilistic", BITS, ["q0", "qh"], "q0", "qh", [("q0", "0", "qh", "0", "N", w)])

    @pytest.mark.parametrize("w", [complex(float("inf"), 0), complex(0, float("nan"))])
    def test_amplitude_must_be_finite(self, w):
        with pytest.raises(InvalidWeight):
            build_machine("quantum", BITS, ["q0", "qh"], "q0", "qh", [("q0", "0", "qh", "0", "N", w)])

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), kind=st.sampled_from(list(Kind)))
    def test_idempotent(self, seed, kind):
        m = random_machine(np.random.default_rng(seed), kind)
        again = build_machine(**m.components())
        assert again == m
        assert [r.weight for r in again.rules] == [r.weight for r in m.rules]


class TestInitialConfiguration:
    def test_word(self, machine):
        m = machine("write1.qtm")
        c = initial_configuration(m, "01")
        assert dict(c.tape) == {0: "0", 1: "1"}
        assert (c.head, c.state) == (0, "q0")

    def test_empty(self, machine):
        c = initial_configuration(machine("write1.qtm"), "")
        assert c.tape == () and c.head == 0 and c.state == "q0"

    def test_unknown_symbol(self, machine):
        with pytest.raises(UnknownSymbol):
            initial_configuration(machine("write1.qtm"), "2")

    def test_blanks_in_input_are_not_stored(self, machine):
        c = initial_configuration(machine("write1.qtm"), "1_1")
        assert c.tape == ((0, "1"), (2, "1"))


tapes = st.dictionaries(st.integers(-6, 6), st.sampled_from(BITS), max_size=8)


@given(tape=tapes, extra=st.lists(st.integers(-10, 10), max_size=4), head=st.integers(-3, 3),
       state=st.sampled_from(["q0", "qh"]))
def test_canonical_form_ignores_explicit_blanks(tape, extra, head, state):
    padded = dict(tape)
    for i in extra:
        padded.setdefault(i, "_")
    a = Configuration.from_mapping(tape, head, state, "_")
    b = Configuration.from_mapping(padded, head, state, "_")
    assert a == b and hash(a) == hash(b)
    assert all(s != "_" for _, s in a.tape)


@given(t1=tapes, t2=tapes, h1=st.integers(-3, 3), h2=st.integers(-3, 3))
def test_canonical_equality_iff_same_content(t1, t2, h1, h2):
    a = Configuration.from_mapping(t1, h1, "q0", "_")
    b = Configuration.from_mapping(t2, h2, "q0", "_")
    same_tape = all(a.read(i, "_") == b.read(i, "_") for i in range(-7, 8))
    assert (a == b) == (same_tape and h1 == h2)


class TestValidateStochastic:
    def test_fair_coin(self):
        report = validate_stochastic(coin())
        assert report.passed
        assert report.sums == {("q0", "_"): 1.0}

    def test_degenerate(self):
        m = build_machine("probabilistic", BITS, ["q0", "qh"], "q0", "qh", [("q0", "_", "qh", "0", "N", 1.0)])
        assert validate_stochastic(m).passed

    def test_oversum(self):
        report = validate_stochastic(coin(0.5, 0.6))
        assert not report.passed
        assert report.sums[("q0", "_")] == pytest.approx(1.1)
        assert "1.1" in report.failures[0]

    def test_wrong_kind(self):
        with pytest.raises(WrongKind):
            validate_stochastic(sqrt_not_machine())

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_random_normalized_vectors_pass(self, seed):
        rng = np.random.default_rng(seed)
        rules = []
        for q in ("q0", "q1"):
            for s in BITS:
                k = int(rng.integers(1, 6))
                w = rng.random(k)
                w /= w.sum()
                targets = [(t, o, d) for t in ("q0", "q1", "qh") for o in BITS for d in "LNR"]
                for i, j in enumerate(rng.choice(len(targets), size=k, replace=False)):
                    rules.append((q, s, *targets[j], float(w[i])))
        m = build_machine("probabilistic", BITS, ["q0", "q1", "qh"], "q0", "qh", rules)
        assert validate_stochastic(m).passed


class TestValidateNormPreserving:
    def test_sqrt_not_passes(self):
        report = validate_norm_preserving(sqrt_not_machine(), ["0", "1"], 2)
        assert report.passed, report.failures

    def test_collapsing_machine_fails(self):
        rules = [("q0", a, "q1", b, "N", R2) for a in "01" for b in "01"]
        m = build_machine("quantum", BITS, ["q0", "q1", "qh"], "q0", "qh", rules)
        report = validate_norm_preserving(m, ["0", "1"], 2)
        assert not report.passed
        (c0, c1, value), = report.bad_pairs
        # hand inner product of (1/sqrt2, 1/sqrt2) with itself
        assert value == pytest.approx(1.0, abs=1e-12)
        assert {dict(c0.tape)[0], dict(c1.tape)[0]} == {"0", "1"}

    def test_identity_rule_passes(self):
        m = build_machine("quantum", BITS, ["q0", "qh"], "q0", "qh", [("q0", "0", "qh", "0", "N", 1)])
        assert validate_norm_preserving(m, ["0", "1", ""], 3).passed

    def test_bad_column_norm(self):
        m = build_machine("quantum", BITS, ["q0", "qh"], "q0", "qh", [("q0", "0", "qh", "0", "N", 0.5)])
        report = validate_norm_preserving(m, ["0"], 1)
        assert not report.passed
        assert report.bad_norms[0][1] == pytest.approx(0.25)

    def test_mixed_depth_collision_is_caught(self):
        # (q0,0) -> h and x; x -> h and x. Columns are orthonormal pairwise,
        # but h already holds amplitude when x feeds it again.
        rules = [("q0", "0", "qh", "0", "N", R2), ("q0", "0", "q1", "0", "N", R2),
                 ("q1", "0", "qh", "0", "N", R2), ("q1", "0", "q1", "0", "N", -R2)]
        m = build_machine("quantum", BITS, ["q0", "q1", "qh"], "q0", "qh", rules)
        assert not validate_norm_preserving(m, ["0"], 2).passed

    def test_errors(self):
        with pytest.raises(WrongKind):
            validate_norm_preserving(coin(), ["0"], 1)
        with pytest.raises(DepthZero):
            validate_norm_preserving(sqrt_not_machine(), ["0"], 0)

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_random_unitary_rewrite_passes(self, seed):
        u = random_unitary(2, np.random.default_rng(seed))
        assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-12)
        assert validate_norm_preserving(bridge_gate_to_machine(u), ["0", "1", ""], 2).passed


def test_weighted_state_check_and_pruning():
    c0 = Configuration.from_mapping({0: "0"}, 0, "qh", "_")
    c1 = Configuration.from_mapping({0: "1"}, 0, "qh", "_")
    ok = WeightedState("amplitude", {c0: R2 * 1j, c1: R2, Configuration((), 0, "q0"): 1e-13})
    assert len(ok) == 2 and ok.check() == []
    assert WeightedState("probability", {c0: 0.7, c1: 0.7}).check()
    assert ok.ranked()[0][0] == c0  # equal probability, canonical order breaks the tie

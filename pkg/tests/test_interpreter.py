import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liffig import model as m
from liffig.interpreter import RunConfig, check_variant, initial_state, run, step
from liffig.parser import parse_program, parse_term

from .conftest import CORPUS, load
from .oracles import euclid, first_primes

GCD_TEXT = (CORPUS / "gcd_stein.lif").read_text()


def gcd_run(program, x, y, **cfg):
    return run(program, {"x": x, "y": y, "x0": x, "y0": y}, RunConfig(**cfg))


def test_halts_with_gcd(gcd_program):
    trace = gcd_run(gcd_program, 12, 8)
    assert trace.result == m.Halted(4)
    assert trace.labels[0] == "S" and trace.labels[-1] == "H"


def test_mutated_start_violates_invariant():
    bad = parse_program(GCD_TEXT.replace("z := 1; goto A", "z := 2; goto A"))
    trace = gcd_run(bad, 3, 3)
    assert isinstance(trace.result, m.AssertionViolation)
    assert trace.result.label == "A"


def test_unchecked_run_ignores_assertions():
    bad = parse_program(GCD_TEXT.replace("z := 1; goto A", "z := 2; goto A"))
    assert gcd_run(bad, 3, 3, check_assertions=False).result == m.Halted(6)


def test_mult_zero(mult_program):
    trace = run(mult_program, {"n0": 0, "n": 0, "a0": 7, "a": 7, "z": 0})
    assert trace.result == m.Halted(0)
    assert trace.final_state["z"] == 0


def test_mult_example(mult_program):
    trace = run(mult_program, {"n0": 13, "n": 13, "a0": 7, "a": 7, "z": 0})
    assert trace.result == m.Halted(91) and trace.final_state["z"] == 91


def test_trial_division_first_primes():
    trace = run(load("primes_trial.lif"), {}, RunConfig(record=False))
    assert isinstance(trace.result, m.Halted)
    assert list(trace.final_state["p"][:5]) == first_primes(5)
    assert trace.warnings  # prose assertions are only partly checked


class TestStep:
    def test_equal_arguments(self, gcd_program):
        s = initial_state(gcd_program, {"x": 7, "y": 7, "x0": 7, "y0": 7, "z": 1})
        r = step(gcd_program, "A", s)
        assert r.kind == "goto" and r.label == "H" and r.state["z"] == 7

    def test_abort_when_no_guard(self):
        p = parse_program("S: true\n  if x > 0 -> goto H\n   | x < 0 -> goto H\n  fi\n"
                          "H: true\n  return x\n")
        assert step(p, "S", initial_state(p)).kind == "abort"
        assert run(p).result == m.Aborted("S")

    def test_overlap_reported(self):
        p = parse_program("S: true\n  if x >= 0 -> goto H\n   | x <= 0 -> goto H\n  fi\n"
                          "H: true\n  return x\n")
        cfg = RunConfig(guard_policy="fail-on-overlap")
        r = step(p, "S", initial_state(p), cfg)
        assert r.kind == "overlap" and r.guards == (0, 1)
        assert isinstance(run(p, {}, cfg).result, m.Nondeterminism)
        # first-true just takes the first arm
        assert run(p).result == m.Halted(0)

    def test_unknown_label(self, gcd_program):
        with pytest.raises(m.UnknownLabel):
            step(gcd_program, "Q", initial_state(gcd_program))


class TestOutcomes:
    def test_fuel(self):
        p = parse_program("S: true\n  goto S\nH: true\n  return 0\n")
        trace = run(p, {}, RunConfig(fuel=50))
        assert trace.result == m.Fault("fuel_exhausted", "S")
        assert trace.visit_count == 50

    def test_division_fault(self):
        p = parse_program("S: true\n  x := 1/x; goto H\nH: true\n  return x\n")
        assert run(p).result == m.Fault("div_by_zero", "S")

    def test_hole_reached(self):
        p = parse_program('S: true\n  if true -> x := 1; "not yet" fi\nH: true\n  return 0\n')
        trace = run(p)
        assert trace.result == m.HoleReached("S", "not yet")

    def test_checked_annotation(self):
        p = parse_program("S: true\n  {x > 1} goto H\nH: true\n  return x\n")
        assert run(p).result == m.Halted(0)
        assert isinstance(run(p, {}, RunConfig(check_annotations=True)).result,
                          m.AssertionViolation)

    def test_unknown_input(self, gcd_program):
        with pytest.raises(KeyError):
            run(gcd_program, {"w": 1})

    def test_record_off_keeps_ends(self, gcd_program):
        full = gcd_run(gcd_program, 40, 12)
        lean = gcd_run(gcd_program, 40, 12, record=False)
        assert lean.result == full.result and lean.visit_count == full.visit_count
        assert lean.visits == [full.visits[0], full.visits[-1]]

    def test_on_visit_hook(self, gcd_program):
        seen = []
        gcd_run(gcd_program, 9, 6, on_visit=lambda label, s: seen.append(label))
        assert seen == gcd_run(gcd_program, 9, 6).labels

    def test_export(self, gcd_program):
        lines = gcd_run(gcd_program, 4, 4).export().splitlines()
        assert lines[0].startswith("S\t") and "x=4" in lines[0]
        assert lines[-1] == "RESULT Halted(4)"


class TestVariant:
    def test_sum_decreases(self, gcd_program):
        assert check_variant(gcd_program, gcd_run(gcd_program, 12, 8), parse_term("x+y"))

    def test_squared_difference_fails_at_second_a(self, gcd_program):
        trace = gcd_run(gcd_program, 6, 5)
        assert trace.labels[:6] == ["S", "A", "B", "E", "C", "A"]
        v = check_variant(gcd_program, trace, parse_term("(x-y)^2"))
        assert not v
        assert (v.index, v.label, v.earlier, v.value) == (5, "A", 1, 4)

    def test_constant_without_circuit(self):
        p = parse_program("S: true\n  goto H\nH: true\n  return 0\n")
        assert check_variant(p, run(p), parse_term("0"))

    def test_negative_variant(self, gcd_program):
        v = check_variant(gcd_program, gcd_run(gcd_program, 3, 2), parse_term("0-x"))
        assert not v and v.earlier is None


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5000), st.integers(1, 5000))
def test_gcd_matches_euclid(x, y):
    assert gcd_run(load("gcd_stein.lif"), x, y).result == m.Halted(euclid(x, y))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 300), st.integers(1, 300))
def test_deterministic(x, y):
    p = load("gcd_stein.lif")
    a, b = gcd_run(p, x, y), gcd_run(p, x, y)
    assert a.visits == b.visits and a.result == b.result

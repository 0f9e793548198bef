import itertools

import pytest

from liffig import model as m
from liffig import printer
from liffig.parser import parse_command, parse_formula, parse_program
from liffig.semantics import BLOCKED, EvalFault, apply_command, eval_formula
from liffig.vc import (AssertionMismatch, CounterExample, DomainWindow, InconsistentGrouping,
                       MissingAssertion, NotCheckable, StateSpaceTooLarge, UnknownTarget,
                       Valid, check_program, check_vc, extract_vcs, merge_snippet,
                       program_vclist, read_vclist, synthesize, vcs_to_liffig, write_vclist)

from .conftest import CORPUS, load
from .oracles import euclid

STEIN_PAIRS = [("S", "A"), ("A", "H"), ("A", "B"), ("A", "B"), ("B", "H"), ("B", "E"),
               ("E", "C"), ("E", "D"), ("C", "B"), ("C", "A"), ("D", "B"), ("D", "A")]

W6 = DomainWindow(default=(1, 6))


def vc_named(program, pre, post, index=0):
    return [v for v in extract_vcs(program) if (v.pre_label, v.post_label) == (pre, post)][index]


def gcd_inv(x0, y0, z, x, y):
    return euclid(x0, y0) == z * euclid(x, y)


class TestExtract:
    def test_pairs_match_listing(self, gcd_program):
        assert [(v.pre_label, v.post_label) for v in extract_vcs(gcd_program)] == STEIN_PAIRS

    def test_guard_prefix(self, gcd_program):
        v = vc_named(gcd_program, "A", "H")
        assert printer.command(v.command) == "x = y; z := z*x"
        assert v.post == m.resolve_assertion(gcd_program, "H")

    def test_straight_body(self):
        p = parse_program("S: true\n  goto H\nH: true\n  return 0\n")
        (v,) = extract_vcs(p)
        assert (v.pre_label, v.post_label) == ("S", "H")
        assert not any(isinstance(c, m.Guard) for c in m.flatten(v.command))

    def test_first_growth_stage(self):
        vcs = extract_vcs(load("gcd_growth_1.lif"))
        assert [(v.pre_label, v.post_label) for v in vcs] == [("S", "A"), ("A", "H")]

    def test_hole_marks_incomplete(self):
        p = parse_program('S: true\n  if true -> "todo" goto H fi\nH: true\n  return 0\n')
        (v,) = extract_vcs(p)
        assert v.has_hole
        assert check_vc(v) == NotCheckable("hole")


class TestCheck:
    def test_equal_branch_valid(self, gcd_program):
        verdict = check_vc(vc_named(gcd_program, "A", "H"))
        assert isinstance(verdict, Valid)
        assert verdict.states == 12**5

    def test_forged_condition_refuted(self, gcd_program):
        a = gcd_program.block("A").assertion
        forged = m.VerificationCondition("A", a, parse_command("x > y"), "H",
                                         m.resolve_assertion(gcd_program, "H"))
        verdict = check_vc(forged)
        assert isinstance(verdict, CounterExample)
        s = verdict.state
        assert s["x"] > s["y"] and gcd_inv(s["x0"], s["y0"], s["z"], s["x"], s["y"])
        assert euclid(s["x0"], s["y0"]) != s["z"]

    def test_witness_is_smallest(self, gcd_program):
        # independent enumeration in the same variable order (sorted names)
        a = gcd_program.block("A").assertion
        forged = m.VerificationCondition("A", a, parse_command("x > y"), "H",
                                         m.resolve_assertion(gcd_program, "H"))
        expected = None
        for x, x0, y, y0, z in itertools.product(range(1, 7), repeat=5):
            if gcd_inv(x0, y0, z, x, y) and x > y and euclid(x0, y0) != z:
                expected = dict(x=x, x0=x0, y=y, y0=y0, z=z)
                break
        verdict = check_vc(forged, W6)
        assert dict(verdict.state) == expected

    def test_false_precondition(self):
        v = m.VerificationCondition("P", m.FalseF(), parse_command("x := 1/0"), "Q",
                                    m.FalseF())
        assert isinstance(check_vc(v), Valid)

    def test_oracle_agreement_on_every_gcd_condition(self, gcd_program):
        # brute-force each condition through apply_command/eval_formula directly
        names = ["x", "x0", "y", "y0", "z"]
        for v in extract_vcs(gcd_program):
            ok = True
            for values in itertools.product(range(1, 6), repeat=5):
                s = m.State(dict(zip(names, values)))
                try:
                    if not eval_formula(s, v.pre):
                        continue
                    t = apply_command(s, v.command)
                    if t is not BLOCKED and not eval_formula(t, v.post):
                        ok = False
                        break
                except EvalFault:
                    continue
            assert ok == isinstance(check_vc(v, DomainWindow(default=(1, 5))), Valid)

    def test_window_monotone(self, gcd_program):
        broken = parse_program((CORPUS / "gcd_stein.lif").read_text()
                               .replace("z := z*x; goto H", "goto H"))
        v = vc_named(broken, "A", "H")
        small = check_vc(v, DomainWindow(default=(1, 4)))
        assert isinstance(small, CounterExample)
        for hi in (5, 8):
            assert isinstance(check_vc(v, DomainWindow(default=(1, hi))), CounterExample)

    def test_workers_do_not_change_verdict(self, gcd_program):
        a = gcd_program.block("A").assertion
        forged = m.VerificationCondition("A", a, parse_command("x > y"), "H",
                                         m.resolve_assertion(gcd_program, "H"))
        one = check_vc(forged, W6)
        two = check_vc(forged, W6, workers=2)
        assert one.state == two.state
        ok = vc_named(gcd_program, "C", "B")
        assert isinstance(check_vc(ok, W6, workers=2), Valid)

    def test_state_cap(self, gcd_program):
        with pytest.raises(StateSpaceTooLarge):
            check_vc(vc_named(gcd_program, "A", "H"), DomainWindow(state_cap=1000))

    def test_faulting_states_skipped(self):
        v = m.VerificationCondition("P", m.TrueF(), parse_command("x := 12/(x-3)"), "Q",
                                    parse_formula("x != 0"))
        verdict = check_vc(v, DomainWindow(default=(1, 5)))
        assert isinstance(verdict, Valid) and verdict.faults

    def test_arrays_enumerated(self):
        p = parse_program("int a[2];\nS: a[0] <= a[1]\n  goto H\nH: a[0] <= a[1]\n"
                          "  return a[0]\n")
        report = check_program(p, DomainWindow(array_elements=(0, 3)))
        assert report.counts["VALID"] == 1
        bad = m.VerificationCondition("S", parse_formula("a[0] <= a[1]"),
                                      parse_command("a[0] := a[1] + 1"), "H",
                                      parse_formula("a[0] <= a[1]"))
        assert isinstance(check_vc(bad, DomainWindow(array_elements=(0, 3)), {"a": 2}),
                          CounterExample)

    def test_trial_division_not_checkable(self):
        report = check_program(load("primes_trial.lif"))
        assert report.counts == {"VALID": 0, "COUNTEREXAMPLE": 0,
                                 "NOTCHECKABLE": len(report.results)}
        assert all(str(v) == "NOTCHECKABLE opaque" for _, v in report.results)

    def test_small_window_all_valid(self, gcd_program):
        report = check_program(gcd_program, W6)
        assert report.summary() == "12 VALID, 0 COUNTEREXAMPLE, 0 NOTCHECKABLE"
        assert len(report.lines()) == 12


class TestTranscription:
    def test_gcd_program_rebuilt(self, gcd_program):
        vl = program_vclist(gcd_program)
        again = vcs_to_liffig(extract_vcs(gcd_program), gcd_program.assertions, "S", "H",
                              decls=gcd_program.decls)
        assert again == gcd_program
        assert synthesize(vl) == gcd_program

    def test_does_nothing(self):
        a = {"S": parse_formula("x = x0"), "H": parse_formula("z = x0")}
        p = vcs_to_liffig([], a, "S", "H")
        assert isinstance(p.block("S").body, m.AbortBlock)
        assert isinstance(p.block("H").body, m.ReturnBlock)

    def test_single_condition(self):
        a = {"S": m.TrueF(), "H": m.TrueF()}
        p = vcs_to_liffig([("S", m.Seq((m.Guard(m.TrueF()),)), "H")], a, "S", "H")
        assert p.labels == ["S", "H"]
        assert extract_vcs(p)[0].post_label == "H"

    def test_missing_assertion(self):
        with pytest.raises(MissingAssertion):
            vcs_to_liffig([("S", m.Seq(()), "Q")], {"S": m.TrueF(), "H": m.TrueF()}, "S", "H")

    def test_grouping(self):
        a = {"S": m.TrueF(), "A": m.TrueF(), "H": m.TrueF()}
        g = m.Seq((m.Guard(m.TrueF()),))
        with pytest.raises(InconsistentGrouping):
            vcs_to_liffig([("S", g, "A"), ("A", g, "H"), ("S", g, "H")], a, "S", "H")

    def test_round_trip_extract(self, gcd_program):
        vcs = extract_vcs(gcd_program)
        rebuilt = vcs_to_liffig(vcs, gcd_program.assertions, "S", "H")
        assert [(v.pre_label, v.command, v.post_label) for v in extract_vcs(rebuilt)] == \
               [(v.pre_label, v.command, v.post_label) for v in vcs]

    def test_file_round_trip(self):
        text = (CORPUS / "gcd.vc").read_text()
        assert write_vclist(read_vclist(text)) == text
        assert write_vclist(program_vclist(synthesize(read_vclist(text)))) == text


class TestSnippets:
    def test_growth_stage_two_to_three(self):
        stage2, stage3 = load("gcd_growth_2.lif"), load("gcd_growth_3.lif")
        b = stage3.block("B")
        grown = merge_snippet(stage2, [stage3.block("E")], {"B": b.body.commands})
        assert grown == stage3

    def test_growth_stage_one_to_three(self):
        stage1, stage3 = load("gcd_growth_1.lif"), load("gcd_growth_3.lif")
        a_new = stage3.block("A").body.commands[1:]
        grown = merge_snippet(stage1, [stage3.block("E")],
                              {"A": a_new, "B": stage3.block("B").body.commands})
        assert grown == stage3

    def test_growth_keeps_old_verdicts(self):
        stage1, stage3 = load("gcd_growth_1.lif"), load("gcd_growth_3.lif")
        old = {(v.pre_label, v.post_label): check_vc(v, W6) for v in extract_vcs(stage1)}
        new = {(v.pre_label, v.post_label): v for v in extract_vcs(stage3)}
        for key, verdict in old.items():
            assert type(check_vc(new[key], W6)) is type(verdict)

    def test_empty_snippet(self, gcd_program):
        assert merge_snippet(gcd_program) == gcd_program

    def test_assertion_mismatch(self):
        stage1 = load("gcd_growth_1.lif")
        rogue = m.Block("B", parse_formula("x > 0"), m.AbortBlock())
        with pytest.raises(AssertionMismatch):
            merge_snippet(stage1, [rogue])

    def test_unknown_target(self):
        stage1 = load("gcd_growth_1.lif")
        gc = m.GuardedCommand(m.TrueF(), m.Seq(()), m.Goto("Q"))
        with pytest.raises(UnknownTarget):
            merge_snippet(stage1, [], {"B": [gc]})

import re
import shutil
import subprocess

import pytest

from liffig import model as m
from liffig.interpreter import RunConfig, run
from liffig.parser import gotos, parse_program
from liffig.transpile import HolePresent, OpaqueAssertion, emit_runtime_checked, to_c

from .conftest import CORPUS, load
from .oracles import euclid

CC = shutil.which("cc") or shutil.which("gcc") or shutil.which("clang")
needs_cc = pytest.mark.skipif(CC is None, reason="no C compiler")


def squash(text):
    return " ".join(text.split())


@pytest.fixture(scope="module")
def gcd_c(gcd_program):
    return to_c(gcd_program, "gcd", ["x", "y"], "z")


def test_golden(gcd_c):
    golden = (CORPUS / "golden" / "gcd_stein.c").read_text()
    assert squash(gcd_c) == squash(golden)


def test_golden_shape():
    golden = (CORPUS / "golden" / "gcd_stein.c").read_text()
    labels = re.findall(r"^([A-Z]): //", golden, re.M)
    assert labels == ["S", "A", "B", "E", "C", "D", "H"]
    assert "swap(&x, &y);" in golden
    assert golden.count("assert(0);") == 5
    assert "if (x < y) { swap(&x, &y); goto B; }" in golden
    assert "hoisted" in golden.splitlines()[1]


def test_guard_order(gcd_c):
    a = gcd_c.split("A: //")[1].split("B: //")[0]
    assert [g for g in re.findall(r"if \((.*?)\) \{", a)] == ["x == y", "x > y", "x < y"]


@pytest.mark.parametrize("name", ["gcd_stein.lif", "mult_double.lif", "primes_sieve.lif",
                                  "primes_trial.lif", "gcd_growth_3.lif"])
def test_structure_preserved(name):
    p = load(name)
    text = to_c(p, "f", [], wide=True)
    pairs, label = [], None
    for line in text.splitlines():
        hit = re.match(r"^([A-Za-z]\w*): //", line)
        if hit:
            label = hit.group(1)
        pairs += [(label, t) for t in re.findall(r"goto (\w+);", line)]
    expected = [(b.label, g.label) for b in p.blocks for g in gotos(b)]
    assert sorted(pairs) == sorted(expected)


def test_abort_block():
    text = to_c(load("gcd_growth_1.lif"), "f", ["x", "y"])
    assert "B: // A & x > y\n  assert(0);" in text


def test_parallel_assignment_temporaries():
    p = parse_program("S: true\n  a, b := b, a; goto H\nH: true\n  return a\n")
    text = to_c(p, "f", ["a", "b"])
    assert "int __t0 = b;" in text and "b = __t1;" in text
    p = parse_program("S: true\n  x, y, z := x/2, y/2, 2*z; goto H\nH: true\n  return z\n")
    assert "x = x / 2; y = y / 2; z = 2 * z;" in to_c(p, "f", ["x", "y", "z"])


def test_hole_rejected():
    p = parse_program('S: true\n  if true -> "todo" goto H fi\nH: true\n  return 0\n')
    with pytest.raises(HolePresent):
        to_c(p, "f", [])


def test_checked_gcd(gcd_program):
    text = emit_runtime_checked(gcd_program, "gcd", ["x", "y"], "z")
    a = text.split("A: //")[1]
    assert a.splitlines()[1].strip() == "assert(gcd0(x0,y0) == z * gcd0(x,y));"
    assert "static int gcd0(" in text


def test_checked_rejects_prose():
    with pytest.raises(OpaqueAssertion):
        emit_runtime_checked(load("primes_trial.lif"), "f", [])


def test_prose_assertions_fine_as_comments():
    assert "goto" in to_c(load("primes_trial.lif"), "f", [], wide=True)


def test_true_assertion():
    p = parse_program("S: true\n  goto H\nH: true\n  return 0\n")
    text = emit_runtime_checked(p, "f", [])
    assert "assert(1);" in text or "assert(" not in text


def test_bad_return_var(gcd_program):
    with pytest.raises(ValueError):
        to_c(gcd_program, "gcd", ["x", "y"], "x")


def compile_and_run(tmp_path, source, main):
    c = tmp_path / "prog.c"
    c.write_text(source + main)
    exe = tmp_path / "prog"
    subprocess.run([CC, "-O1", "-o", str(exe), str(c)], check=True, capture_output=True)
    return subprocess.run([str(exe)], check=True, capture_output=True, text=True).stdout


GCD_MAIN = """
#include <stdio.h>
int main(void) {
  for (int x = 1; x <= 50; x++)
    for (int y = 1; y <= 50; y++)
      printf("%d\\n", gcd(x, y));
  return 0;
}
"""


@needs_cc
@pytest.mark.parametrize("checked", [False, True])
def test_compiled_gcd_agrees(tmp_path, gcd_program, checked):
    src = to_c(gcd_program, "gcd", ["x", "y"], "z", checked=checked)
    out = [int(v) for v in compile_and_run(tmp_path, src, GCD_MAIN).split()]
    expected = []
    for x in range(1, 51):
        for y in range(1, 51):
            trace = run(gcd_program, {"x": x, "y": y, "x0": x, "y0": y},
                        RunConfig(record=False))
            expected.append(trace.result.value)
    assert out == expected
    assert expected[:3] == [euclid(1, 1), euclid(1, 2), euclid(1, 3)]


@needs_cc
def test_compiled_sieve(tmp_path):
    p = load("primes_sieve.lif")
    main = '\n#include <stdio.h>\nint main(void) { printf("%lld\\n", sieve()); return 0; }\n'
    out = compile_and_run(tmp_path, to_c(p, "sieve", [], wide=True), main)
    assert int(out) == 7919

import shutil
import subprocess

import pytest

from liffig.cli import main

from .conftest import CORPUS


def cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def corpus(name):
    return CORPUS / name


def test_check_clean(capsys):
    code, out, _ = cli(capsys, "check", corpus("gcd_stein.lif"))
    assert code == 0 and "0 warnings, 0 errors" in out


def test_check_prose_warnings(capsys):
    code, out, _ = cli(capsys, "check", corpus("primes_trial.lif"))
    assert code == 0 and out.count("kept as prose") == 5


def test_check_dangling_goto(capsys, tmp_path):
    bad = tmp_path / "bad.lif"
    bad.write_text("S: true\n  goto Z\nH: true\n  return 0\n")
    code, _, err = cli(capsys, "check", bad)
    assert code == 1 and "Z" in err


def test_run_gcd(capsys):
    code, out, _ = cli(capsys, "run", corpus("gcd_stein.lif"), "--set", "x=12,y=8,x0=12,y0=8")
    assert code == 0 and out.splitlines()[0] == "RESULT Halted(4)"


def test_run_bind_ghosts(capsys):
    code, out, _ = cli(capsys, "run", corpus("gcd_stein.lif"), "--set", "x=9",
                       "--set", "y=6", "--bind-ghosts")
    assert out.splitlines()[0] == "RESULT Halted(3)"


def test_run_mult(capsys):
    code, out, _ = cli(capsys, "run", corpus("mult_double.lif"),
                       "--set", "n=13,n0=13,a=7,a0=7,z=0")
    assert code == 0 and "RESULT Halted(91)" in out and "z=91" in out


def test_run_primes(capsys):
    code, out, _ = cli(capsys, "run", corpus("primes_trial.lif"))
    assert code == 0 and "p=[2,3,5,7,11," in out


def test_run_variant_and_trace(capsys, tmp_path):
    trace = tmp_path / "t.txt"
    code, out, _ = cli(capsys, "run", corpus("gcd_stein.lif"), "--set", "x=6,y=5",
                       "--bind-ghosts", "--variant", "(x-y)^2", "--trace", trace)
    assert code == 0 and "VARIANT VIOLATION at visit 5 (A)" in out
    assert trace.read_text().splitlines()[-1] == "RESULT Halted(1)"


def test_run_unknown_variable(capsys):
    code, _, err = cli(capsys, "run", corpus("gcd_stein.lif"), "--set", "w=1")
    assert code == 1 and "w" in err


def test_run_violation_exit(capsys, tmp_path):
    bad = tmp_path / "bad.lif"
    bad.write_text("S: x > 0\n  goto H\nH: true\n  return x\n")
    code, out, _ = cli(capsys, "run", bad)
    assert code == 2 and "AssertionViolation" in out


def test_run_fault_exit(capsys, tmp_path):
    loop = tmp_path / "loop.lif"
    loop.write_text("S: true\n  goto S\nH: true\n  return 0\n")
    code, out, _ = cli(capsys, "run", loop, "--fuel", "10")
    assert code == 3 and "fuel_exhausted" in out


def test_vcs(capsys):
    code, out, _ = cli(capsys, "vcs", corpus("gcd_stein.lif"))
    conditions = out.split("conditions:\n")[1].splitlines()
    assert code == 0 and len(conditions) == 12
    assert out == corpus("gcd.vc").read_text()


def test_verify(capsys):
    code, out, _ = cli(capsys, "verify", corpus("gcd_stein.lif"), "--window", "1..5")
    assert code == 0
    assert out.splitlines()[-1].startswith("12 VALID, 0 COUNTEREXAMPLE, 0 NOTCHECKABLE")


def test_verify_counterexample_exit(capsys, tmp_path):
    src = corpus("gcd_stein.lif").read_text().replace("z := z*x; goto H", "goto H")
    f = tmp_path / "broken.lif"
    f.write_text(src)
    code, out, _ = cli(capsys, "verify", f, "--window", "1..4")
    assert code == 2 and "1 COUNTEREXAMPLE" in out


def test_synth_round_trip(capsys, tmp_path):
    lif = tmp_path / "s.lif"
    assert cli(capsys, "synth", corpus("gcd.vc"), "--out", lif)[0] == 0
    code, out, _ = cli(capsys, "vcs", lif)
    assert out == corpus("gcd.vc").read_text()


def test_transpile(capsys):
    code, out, _ = cli(capsys, "transpile", corpus("gcd_stein.lif"), "--name", "gcd",
                       "--params", "x,y", "--returns", "z")
    assert code == 0
    assert out == (CORPUS / "golden" / "gcd_stein.c").read_text()


def test_transpile_checked(capsys):
    code, out, _ = cli(capsys, "transpile", corpus("gcd_stein.lif"), "--name", "gcd",
                       "--params", "x,y", "--checked")
    assert "assert(gcd0(x0,y0) == z * gcd0(x,y));" in out


@pytest.mark.skipif(shutil.which("liffig") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["liffig", "run", str(corpus("gcd_stein.lif")), "--set", "x=4,y=6",
                           "--bind-ghosts"], capture_output=True, text=True)
    assert proc.returncode == 0 and "Halted(2)" in proc.stdout

from pathlib import Path

import pytest

from liffig import parse_program

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def load(name: str):
    return parse_program((CORPUS / name).read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS


@pytest.fixture(scope="session")
def gcd_program():
    return load("gcd_stein.lif")


@pytest.fixture(scope="session")
def mult_program():
    return load("mult_double.lif")


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance
    if test_acceptance.LINES:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.LINES:
            terminalreporter.write_line(line)

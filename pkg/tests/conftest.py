import sys
from pathlib import Path

import pytest

from horsck.automata import parse_automaton
from horsck.syntax import parse_scheme

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def load(name: str):
    text = (CORPUS / name).read_text()
    return parse_automaton(text) if name.endswith(".apt") else parse_scheme(text)


@pytest.fixture
def lists():
    return load("lists.hors"), load("lists.apt")


@pytest.fixture
def abc():
    return load("abc.hors")


def pytest_terminal_summary(terminalreporter):
    # one line per acceptance criterion, whether or not output is captured
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])

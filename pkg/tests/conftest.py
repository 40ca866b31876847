"""Shared fixtures: the running example, the two product-grammar examples,
and the collector behind the acceptance summary."""

from __future__ import annotations

from pathlib import Path

import pytest

from flatoct.bounded import BoundedExpression
from flatoct.fop import FopFile, read_fop
from flatoct.grammar import Grammar

ROOT = Path(__file__).resolve().parents[1]
PROGRAMS = ROOT / "programs"

#: Lines printed after the run, one per acceptance criterion.
ACCEPTANCE_LINES: list[str] = []

# X -> a Y, Y -> Z b, Z -> c T | eps, T -> X d: L_X = {(ac)^n ab (db)^n}
NESTED_RULES = "X -> a Y; Y -> Z b; Z -> c T | eps; T -> X d"
NESTED_BOUND = "(a c)* (a b)* (d b)*"


def load_program(name: str) -> FopFile:
    return read_fop(PROGRAMS / name)


@pytest.fixture(scope="session")
def running() -> FopFile:
    return load_program("running.fop")


@pytest.fixture(scope="session")
def running_grammar(running) -> Grammar:
    return running.grammar()


@pytest.fixture(scope="session")
def nested_grammar() -> Grammar:
    return Grammar.from_rules(NESTED_RULES)


@pytest.fixture(scope="session")
def nested_bound() -> BoundedExpression:
    return BoundedExpression.parse(NESTED_BOUND)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

import pytest

from autoseq.core import Morphism
from autoseq.seqlib import builtin_morphism


def naive_fixed_point(rules: dict, start: str, n: int, coding: dict | None = None) -> list:
    """Iterate the morphism on plain lists; independent of the library's expander."""
    w = [start]
    while len(w) < n:
        nxt = []
        for a in w:
            nxt.extend(rules[a])
        if len(nxt) <= len(w):
            break
        w = nxt
    w = w[:n]
    return [coding[a] for a in w] if coding else w


@pytest.fixture
def tm():
    return builtin_morphism("thue-morse")


@pytest.fixture
def fib():
    return builtin_morphism("fibonacci")


@pytest.fixture
def aab():
    return builtin_morphism("aab")


@pytest.fixture
def m211():
    return builtin_morphism("m211")


@pytest.fixture
def m36():
    return builtin_morphism("m36")


@pytest.fixture
def grig():
    return builtin_morphism("grigorchuk")


def morph(rules, start=None, coding=None, matrix_only=False) -> Morphism:
    return Morphism.from_dict(rules, start=start, coding=coding, matrix_only=matrix_only)


# acceptance bookkeeping: one line per criterion in the terminal summary
ACCEPTANCE: dict[int, tuple[str, float, float]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, elapsed, limit = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {status} ({elapsed:.2f} s, limit {limit:g} s)")

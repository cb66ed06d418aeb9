from __future__ import annotations

import pytest
from hypothesis import settings

from ltopos.fixtures import builtin
from ltopos.presheaf import Presheaf

settings.register_profile("ltopos", max_examples=40, deadline=None)
settings.load_profile("ltopos")


def finite_set(n: int, cat=None) -> Presheaf:
    """An n-element presheaf on the terminal category."""
    cat = cat or builtin("C1")
    return Presheaf(cat, {"*": range(n)}, {}, name=f"{n}")


@pytest.fixture
def C1():
    return builtin("C1")


@pytest.fixture
def C2():
    return builtin("C2")


@pytest.fixture
def M2():
    return builtin("M2")


@pytest.fixture
def Z2():
    return builtin("Z2")


def presheaves(max_size: int = 2, names=("C1", "C2", "M2", "Z2")):
    """Hypothesis strategy drawing one fixture presheaf from a builtin category."""
    from hypothesis import strategies as st

    from ltopos.fixtures import enumerate_presheaves

    pool = [F for n in names for F in enumerate_presheaves(builtin(n), max_size)]
    return st.sampled_from(pool)


def presheaf_pairs(max_size: int = 2, names=("C1", "C2", "M2", "Z2")):
    from hypothesis import strategies as st

    from ltopos.fixtures import enumerate_presheaves

    def pick(name):
        pool = enumerate_presheaves(builtin(name), max_size)
        return st.tuples(st.sampled_from(pool), st.sampled_from(pool))

    return st.sampled_from(names).flatmap(pick)


# criterion number -> (passed, one-line detail), filled by test_acceptance.py
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")

import sys
from fractions import Fraction

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from sigmarot.mapfile import example_map
from sigmarot.space import Branch, Line

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def fixture_map():
    return example_map()


def fractions(lo=-5, hi=5, max_den=16):
    return st.builds(
        lambda num, den: Fraction(num, den),
        st.integers(lo * max_den, hi * max_den),
        st.integers(1, max_den),
    ).filter(lambda x: lo <= x <= hi)


def heights(max_den=16):
    return st.builds(lambda j, d: Fraction(j, d), st.integers(1, max_den), st.integers(1, max_den)) \
        .filter(lambda s: 0 < s <= 1)


def points(max_den=16):
    return st.one_of(
        st.builds(Line, fractions(max_den=max_den)),
        st.builds(Branch, st.integers(-4, 4), heights(max_den)),
    )


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])

from fractions import Fraction

import hypothesis.strategies as st
from hypothesis import settings

from specgap.diffpoly import DiffPoly, a, v

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

small_fraction = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 6))

atom = st.one_of(
    st.builds(lambda k: v(k), st.integers(0, 3)),
    st.builds(lambda n, k: a(n, k), st.integers(0, 2), st.integers(0, 3)),
)


@st.composite
def diffpolys(draw, max_terms=4):
    p = DiffPoly()
    for _ in range(draw(st.integers(0, max_terms))):
        mono = DiffPoly.const(draw(small_fraction))
        for _ in range(draw(st.integers(0, 3))):
            mono = mono * draw(atom)
        p = p + mono
    return p


# one summary line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])

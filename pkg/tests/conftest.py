import os
import sys
from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from carnot.scalar import Scalar  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

small_fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def scalars(draw, d=3):
    a = draw(small_fractions)
    b = draw(small_fractions) if d != 1 else Fraction(0)
    return Scalar(a, b, d)


@st.composite
def rational_vectors(draw, n):
    return tuple(Scalar(draw(small_fractions)) for _ in range(n))


@pytest.fixture
def data_dir():
    from importlib import resources

    return str(resources.files("carnot") / "data")


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])

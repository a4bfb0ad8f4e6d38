from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

settings.register_profile("default", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("default")

#: Hypothesis strategy for seeds of numpy generators.
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


#: ``(criterion, passed, text)`` lines recorded by the acceptance tests.
ACCEPTANCE_LINES: list[tuple[int, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, _, text in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(text)

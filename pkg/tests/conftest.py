import sys

import numpy as np
import pytest

from fmoperad.config import DEFAULT_RHO0

RHO0 = DEFAULT_RHO0


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)



def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", {})
    if results:
        terminalreporter.section("acceptance criteria")
        for num in sorted(results):
            terminalreporter.write_line(results[num])

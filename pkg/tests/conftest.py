import numpy as np
import pytest

import acceptance_log


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not acceptance_log.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(acceptance_log.LINES, key=acceptance_log.sort_key):
        terminalreporter.write_line(acceptance_log.LINES[key])

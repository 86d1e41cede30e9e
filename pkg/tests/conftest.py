import os
import tempfile

import pytest


def pytest_configure(config):
    # keep the matched-distribution cache out of the user's home during tests
    if not os.environ.get("CHAOSDE_CACHE_DIR"):
        os.environ["CHAOSDE_CACHE_DIR"] = tempfile.mkdtemp(prefix="chaosde-cache-")


@pytest.fixture
def rng():
    return __import__("numpy").random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in REPORT:
            terminalreporter.write_line(line)

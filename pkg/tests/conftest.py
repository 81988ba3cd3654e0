import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fairaudit.fixtures import berkeley_dataset, grant_dataset, symmetric_dataset  # noqa: E402
from fairaudit.binary_metrics import confusion_by_group  # noqa: E402


@pytest.fixture
def grant():
    return grant_dataset()


@pytest.fixture
def grant_confusions(grant):
    return confusion_by_group(grant)


@pytest.fixture
def berkeley():
    return berkeley_dataset()


@pytest.fixture
def symmetric():
    return symmetric_dataset()


ACCEPTANCE_LINES = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    number, title = mark.args
    verdict = "PASS" if rep.passed else "FAIL"
    line = f"criterion {number} {verdict}: {title}"
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

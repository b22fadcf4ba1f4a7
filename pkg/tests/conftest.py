import re

import pytest

from unruhneg.params import UnruhWeights, make_squeezing

_CRITERIA = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    num = int(m.group(1))
    failed = report.failed
    prev = _CRITERIA.get(num, (m.group(2), True))
    _CRITERIA[num] = (prev[0], prev[1] and not failed and not report.skipped)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        name, ok = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {name.replace('_', ' ')}")


@pytest.fixture
def weights():
    return lambda q, phase=0.0: UnruhWeights.from_qr(q, phase)


@pytest.fixture
def squeeze():
    return make_squeezing

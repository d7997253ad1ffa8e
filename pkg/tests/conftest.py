import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

_acceptance: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.passed:
        status = "PASS"
    elif hasattr(report, "wasxfail"):
        status = "FAIL (expected, see ledger)"
    else:
        status = "FAIL"
    _acceptance.append((name, status))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in _acceptance:
        terminalreporter.write_line(f"{name}: {status}")

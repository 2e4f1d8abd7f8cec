import pytest

_CRITERIA = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    detail = "; ".join(f"{k}={v}" for k, v in item.user_properties)
    _CRITERIA.append((marker.args[0], marker.args[1], report.outcome, detail))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number, title, outcome, detail in sorted(_CRITERIA):
        status = "PASS" if outcome == "passed" else "FAIL"
        tr.write_line(f"[{status}] criterion {number:2d}: {title}"
                      + (f"  ({detail})" if detail else ""))

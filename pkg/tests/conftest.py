import mpmath
import pytest

_ACCEPTANCE: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): one numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    entry = _ACCEPTANCE.setdefault(number, {"title": title, "passed": True, "detail": ""})
    if report.failed:
        entry["passed"] = False
        if report.when == "call" and call.excinfo is not None:
            entry["detail"] = call.excinfo.exconly().splitlines()[0][:160]
    detail = getattr(item, "acceptance_detail", None)
    if detail and entry["passed"]:
        entry["detail"] = detail


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        entry = _ACCEPTANCE[number]
        status = "PASS" if entry["passed"] else "FAIL"
        line = f"[{status}] criterion {number}: {entry['title']}"
        if entry["detail"]:
            line += f" ({entry['detail']})"
        terminalreporter.write_line(line)


@pytest.fixture
def detail(request):
    """Attach a one-line summary to the acceptance line of the current test."""

    def set_detail(text: str) -> None:
        request.node.acceptance_detail = text

    return set_detail


mpmath.mp.dps = 50


def q_tail(z) -> float:
    """Standard normal upper tail in 50-digit arithmetic, independent of scipy."""
    return float(mpmath.erfc(mpmath.mpf(z) / mpmath.sqrt(2)) / 2)


def log_q_tail(z) -> float:
    """Natural log of the upper tail, for arguments where the tail underflows a double."""
    return float(mpmath.log(mpmath.erfc(mpmath.mpf(z) / mpmath.sqrt(2)) / 2))


@pytest.fixture(scope="session")
def Q():
    return q_tail


@pytest.fixture(scope="session")
def logQ():
    return log_q_tail


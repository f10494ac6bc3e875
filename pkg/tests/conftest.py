import pytest

_details = {}
_outcomes = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): numbered acceptance criterion")


@pytest.fixture
def detail(request):
    """Attach a measured quantity to the summary line of the current criterion."""
    n = request.node.get_closest_marker("criterion").args[0]
    return lambda text: _details.setdefault(n, []).append(text)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None and (rep.when == "call" or rep.failed):
        n = marker.args[0]
        _outcomes[n] = _outcomes.get(n, True) and rep.passed


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        status = "PASS" if _outcomes[n] else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {n:>2}: {'; '.join(_details.get(n, []))}")

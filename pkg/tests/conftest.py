import pytest

_VERDICTS: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.fixture
def verdict(request):
    """Record a one-line detail for the acceptance summary."""
    marker = request.node.get_closest_marker("criterion")
    number = marker.args[0]

    def note(text: str) -> None:
        _VERDICTS[number] = (request.node.name, text)

    note("")
    return note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    name, detail = _VERDICTS.get(marker.args[0], (item.name, ""))
    status = "PASS" if report.passed else "FAIL"
    _VERDICTS[marker.args[0]] = (name, detail, status)


def pytest_terminal_summary(terminalreporter):
    rows = {k: v for k, v in _VERDICTS.items() if len(v) == 3}
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(rows):
        name, detail, status = rows[number]
        line = f"criterion {number:>2}: {status}  {name}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)

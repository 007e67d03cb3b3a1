import pytest

_RESULTS: list[tuple[str, bool, str]] = []


class _Recorder:
    def __init__(self, name: str):
        self.name = name
        self.notes: list[str] = []

    def note(self, text: str) -> None:
        self.notes.append(text)


@pytest.fixture
def acceptance(request):
    """Record a PASS/FAIL line for the requesting acceptance test."""
    rec = _Recorder(request.node.name)
    yield rec
    call = getattr(request.node, "rep_call", None)
    passed = call is not None and call.passed
    _RESULTS.append((rec.name, passed, "; ".join(rec.notes)))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, notes in _RESULTS:
        line = f"{'PASS' if passed else 'FAIL'} {name}"
        terminalreporter.write_line(f"{line}  [{notes}]" if notes else line)

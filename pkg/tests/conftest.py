from contextlib import contextmanager

import pytest

_RESULTS: list[tuple[str, bool]] = []


@pytest.fixture
def criterion():
    """Context manager recording one PASS/FAIL line per acceptance criterion."""

    @contextmanager
    def check(name: str):
        try:
            yield
        except BaseException:
            _RESULTS.append((name, False))
            print(f"FAIL  {name}")
            raise
        _RESULTS.append((name, True))
        print(f"PASS  {name}")

    return check


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok in _RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}")

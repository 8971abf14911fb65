import time
from itertools import product

import pytest

from rwscenery.distinguish import primitive_root

_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one acceptance line; fails the test when ``ok`` is false."""

    def report(number, ok, detail):
        _CRITERIA.append((number, bool(ok), detail))
        assert ok, f"criterion {number}: {detail}"

    return report


@pytest.fixture
def stopwatch():
    class Watch:
        def __enter__(self):
            self.start = time.perf_counter()
            return self

        def __exit__(self, *exc):
            self.elapsed = time.perf_counter() - self.start

    return Watch


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(_CRITERIA, key=lambda t: str(t[0])):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}: {detail}")


def primitive_binary_words(max_len):
    return [
        w
        for k in range(1, max_len + 1)
        for w in map("".join, product("01", repeat=k))
        if primitive_root(w) == w
    ]

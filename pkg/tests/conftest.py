import functools

import pytest

from zsnft import discretize as D
from zsnft import profiles as P

_CRITERIA = {}


@pytest.fixture
def criterion():
    """Record and print one pass/fail line for an acceptance criterion."""

    def record(number, title, ok, detail=""):
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}  {detail}".rstrip()
        _CRITERIA[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[k])


@functools.lru_cache(maxsize=None)
def sampled(kind, A, L, n):
    return D.sample(P.ProfileSpec(P.ProfileKind(kind), A, L), n=n)


@pytest.fixture
def pot():
    return sampled

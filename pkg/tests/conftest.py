from functools import lru_cache

import pytest

from congbox.ffcore import build_field_ctx


@lru_cache(maxsize=None)
def field(p):
    return build_field_ctx(p)


@pytest.fixture
def ctx():
    return field


@pytest.fixture
def ctx7():
    return field(7)


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)

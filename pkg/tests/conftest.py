"""Shared fixtures and the acceptance summary printed at the end of a run."""

import pytest

from fisher_ec import _backend
from fisher_ec.fading import FadingParams

GRID_M = (0.5, 1.0, 2.5, 3.5)
GRID_MS = (1.5, 2.5, 5.0)
GRID_SNR = (1.0, 10.0, 100.0)

_OUTCOMES = pytest.StashKey[dict]()


def grid():
    return [FadingParams(m, ms, g) for m in GRID_M for ms in GRID_MS for g in GRID_SNR]


@pytest.fixture(params=_backend.available())
def backend(request):
    return _backend.get(request.param)


def pytest_configure(config):
    config.stash[_OUTCOMES] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    number, title = mark.args
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    item.config.stash[_OUTCOMES][number] = (title, rep.passed, detail)


def pytest_terminal_summary(terminalreporter, config):
    outcomes = config.stash.get(_OUTCOMES, {})
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(outcomes):
        title, ok, detail = outcomes[number]
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)

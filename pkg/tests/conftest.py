import warnings

import pytest

from qtutte.errors import DegradedAccuracyWarning

_ACCEPTANCE: dict[str, tuple[str, bool]] = {}


@pytest.fixture(autouse=True)
def _quiet_degraded_accuracy():
    # HHL flags small clamped masses on most non-representable systems; tests
    # that care about the warning use pytest.warns explicitly
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegradedAccuracyWarning)
        yield


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if item.get_closest_marker("acceptance") is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        _ACCEPTANCE[item.name] = (doc, rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        doc, ok = _ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {doc}")

"""Shared pytest configuration.

Tests marked ``@pytest.mark.criterion("ACn", "summary")`` get a one-line
pass/fail verdict in the terminal summary. Details recorded with the
``detail`` fixture are appended to that line.
"""
from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("default")

_VERDICTS: dict[str, tuple[bool, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name, summary): acceptance criterion with a printed verdict")


@pytest.fixture
def detail(request):
    """Attach a short measurement string to the criterion verdict line."""
    notes: list[str] = []
    request.node._criterion_notes = notes
    return notes.append


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call":
        return
    name, summary = marker.args[0], marker.args[1] if len(marker.args) > 1 else ""
    notes = "; ".join(getattr(item, "_criterion_notes", []))
    _VERDICTS[name] = (rep.passed, summary, notes)
    line = f"[{'PASS' if rep.passed else 'FAIL'}] {name} {summary}" + (f" ({notes})" if notes else "")
    print("\n" + line)


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_VERDICTS, key=lambda s: int(s[2:]) if s[2:].isdigit() else s):
        ok, summary, notes = _VERDICTS[name]
        line = f"[{'PASS' if ok else 'FAIL'}] {name} {summary}" + (f" ({notes})" if notes else "")
        terminalreporter.write_line(line)

import os
import random

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

SEED = int(os.environ.get("HALG_SEED", "20240611"))

_criteria: dict[int, tuple[str, str, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.fixture
def seed():
    return SEED


@pytest.fixture
def rng():
    return random.Random(SEED)


@pytest.fixture
def elapsed(request):
    """Callers store the timed section's duration here for the summary."""
    box = {"seconds": 0.0}
    request.node._elapsed = box
    return box


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    item_marker = getattr(report, "_criterion", None)
    if item_marker is None:
        return
    number, title, seconds = item_marker
    _criteria[number] = (title, "PASS" if report.passed else "FAIL", seconds)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        box = getattr(item, "_elapsed", {"seconds": 0.0})
        report._criterion = (marker.args[0], marker.args[1], box["seconds"])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, verdict, seconds = _criteria[number]
        terminalreporter.write_line(f"{verdict}  criterion {number:2d}  {title}  ({seconds:.2f} s)")

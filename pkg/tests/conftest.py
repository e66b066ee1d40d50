import pytest

from hamsat.basegraph import petersen
from hamsat.layout import InstanceConfig
from hamsat.params import run_pipeline

# smallest N with ten parts passing the battery for k=5, l=2 (frozen from scan_min_n)
PETERSEN_N = 343752

_criteria: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    num, title = marker.args
    _criteria[num] = ("PASS" if report.passed else "FAIL", title)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        status, title = _criteria[num]
        terminalreporter.write_line(f"{status} criterion {num}: {title}")


@pytest.fixture(scope="session")
def graph():
    return petersen()


@pytest.fixture(scope="session")
def instance():
    """Ten-part Petersen instance for k=5, l=2: (params, layout, report)."""
    return run_pipeline(InstanceConfig(5, 2, PETERSEN_N, relaxed=True))

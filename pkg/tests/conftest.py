import pytest

from crosswash.dataset import JoinMode, load_dataset, fixture_dir

_acceptance_results: list[tuple[str, str]] = []


@pytest.fixture(scope="session")
def dataset():
    return load_dataset(fixture_dir())


@pytest.fixture(scope="session")
def merged(dataset):
    return dataset.activities(JoinMode.INNER)


@pytest.fixture(autouse=True)
def _isolate_data_dir_env(monkeypatch):
    monkeypatch.delenv("CROSSWASH_DATA_DIR", raising=False)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and report.when == "call":
        _acceptance_results.append((marker.args[0], "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in _acceptance_results:
        terminalreporter.write_line(f"{status}  {name}")

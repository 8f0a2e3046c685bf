from pathlib import Path

import pytest

from infocus import data_path, load_project

FIXTURES = Path(__file__).parent / "fixtures"

_criteria: dict[str, dict] = {}


@pytest.fixture
def figure3():
    return load_project(data_path("figure3.json").read_bytes())


@pytest.fixture
def synthetic50():
    return load_project(data_path("synthetic50.json").read_bytes())


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def pytest_runtest_logreport(report):
    if report.when != "call" and report.outcome != "failed":
        return
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    cid, title = marker
    entry = _criteria.setdefault(cid, {"title": title, "ok": True})
    if report.outcome != "passed":
        entry["ok"] = False


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        rep.criterion = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_criteria):
        e = _criteria[cid]
        terminalreporter.write_line(f"{'PASS' if e['ok'] else 'FAIL'}  {cid}  {e['title']}")

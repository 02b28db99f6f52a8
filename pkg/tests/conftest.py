import pytest
from hypothesis import settings

from qrb.backends import demo12, heavy_hex27

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def backend():
    return demo12()


@pytest.fixture(scope="session")
def hex27():
    return heavy_hex27()


# -- acceptance summary --------------------------------------------------------
#
# Tests marked ``criterion(n, title)`` are gathered into one line per
# criterion at the end of the run. A criterion passes only if every test
# carrying its number passes. Details come from ``record_property("detail", ...)``.

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (report.when != "call" and report.passed):
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, {"title": title, "ok": True, "details": []})
    if not report.passed:
        entry["ok"] = False
    if report.when == "call":
        entry["details"] += [str(v) for k, v in item.user_properties if k == "detail"]
        if report.failed:
            entry["details"].append(str(report.longrepr.reprcrash.message).splitlines()[0]
                                    if hasattr(report.longrepr, "reprcrash") else "failed")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        status = "PASS" if entry["ok"] else "FAIL"
        detail = "; ".join(entry["details"])
        terminalreporter.write_line(f"[{status}] {number:2d} {entry['title']}" + (f" -- {detail}" if detail else ""))

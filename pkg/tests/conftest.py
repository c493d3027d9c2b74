import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=int(os.environ.get("QMAT_HYPOTHESIS_EXAMPLES", "60")),
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


# -- acceptance summary: one line per criterion ------------------------------

_CRITERIA: dict[str, tuple[int, str]] = {}
_OUTCOME: dict[int, list] = {}


def pytest_collection_modifyitems(config, items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            _CRITERIA[item.nodeid] = mark.args


def pytest_runtest_logreport(report):
    if report.nodeid not in _CRITERIA:
        return
    n, title = _CRITERIA[report.nodeid]
    entry = _OUTCOME.setdefault(n, [title, True, 0.0, 0])
    entry[2] += report.duration
    if report.when == "call":
        entry[3] += 1
    if report.failed or report.skipped:
        entry[1] = False


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOME:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_OUTCOME):
        title, ok, seconds, ran = _OUTCOME[n]
        ok = ok and ran > 0
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}  ({ran} tests, {seconds:.1f}s)")

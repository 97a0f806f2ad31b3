"""Collects acceptance-criterion outcomes and prints one line per criterion."""
import pytest

_outcomes = {}  # criterion number -> list of (passed, title, detail)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        passed = rep.passed and not hasattr(rep, "wasxfail")
        detail = dict(item.user_properties).get("detail", "")
        _outcomes.setdefault(mark.args[0], []).append((passed, mark.args[1], item.name, detail))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_outcomes):
        rows = _outcomes[num]
        ok = all(r[0] for r in rows)
        tr.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {rows[0][1]}")
        for passed, _, name, detail in rows:
            tr.write_line(f"    {'ok  ' if passed else 'FAIL'} {name}: {detail}")

import pytest

_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if not item.name.startswith("test_criterion_"):
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        doc = (item.function.__doc__ or "").strip().splitlines()
        _CRITERIA[item.name] = (rep.passed, doc[0] if doc else item.name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for name in sorted(_CRITERIA):
        ok, desc = _CRITERIA[name]
        num = name.split("_")[2]
        tr.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {desc}")
    passed = sum(ok for ok, _ in _CRITERIA.values())
    tr.write_line(f"{passed}/{len(_CRITERIA)} criteria passed")

import re

TITLES = {
    1: "engine self-consistency (Gauss and Codazzi over the corpus)",
    2: "classification round trip on randomized constructions",
    3: "rectifying iff concurrent, positive and negative families",
    4: "structure suite on constructed examples",
    5: "curve case",
    6: "conic, spherical and proper classifiers",
    7: "jets against finite differences",
    8: "tooling determinism",
}

_OUTCOMES: dict[int, list[str]] = {}


def pytest_runtest_logreport(report):
    found = re.search(r"test_acceptance\.py::test_criterion_(\d+)_", report.nodeid)
    if found and (report.when == "call" or report.outcome != "passed"):
        _OUTCOMES.setdefault(int(found.group(1)), []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_OUTCOMES):
        verdict = "PASS" if all(o == "passed" for o in _OUTCOMES[k]) else "FAIL"
        terminalreporter.write_line(f"criterion {k}: {verdict}  {TITLES.get(k, '')}")

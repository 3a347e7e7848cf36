"""Surface one verdict line per acceptance criterion in the terminal summary.

Verdicts printed inside passing tests are hidden by output capture; this hook
re-emits them after the run so `pytest -v` shows an explicit pass/fail line
for every acceptance criterion. Criteria whose test failed or never ran are
reported as FAIL.
"""


import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    module = next(
        (m for name, m in sys.modules.items()
         if name.rpartition(".")[2] == "test_acceptance" and m is not None),
        None,
    )
    verdicts = getattr(module, "VERDICTS", [])
    if verdicts:
        terminalreporter.section("acceptance criteria")
        for line in verdicts:
            terminalreporter.write_line(line)
    failed = {rep.nodeid for rep in terminalreporter.stats.get("failed", [])}
    for rep in list(failed):
        if "test_acceptance" in rep:
            name = rep.split("::")[-1]
            terminalreporter.write_line(f"[acceptance] {name}: FAIL")

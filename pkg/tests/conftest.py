import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One verdict line per acceptance criterion at the end of the run."""
    rows = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if outcome != "error" and getattr(rep, "when", "call") != "call":
                continue
            match = _CRITERION.search(getattr(rep, "nodeid", ""))
            if match:
                rows.append((int(match.group(1)), match.group(2),
                             outcome == "passed"))
    if not rows:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for num, slug, ok in sorted(rows):
        word = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {num:2d}: {word} ({slug})")

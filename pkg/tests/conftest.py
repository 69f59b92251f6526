CRITERIA: dict[str, str] = {}


def record(name: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    CRITERIA[name] = f"[{status}] {name}" + (f" ({detail})" if detail else "")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for line in CRITERIA.values():
        terminalreporter.write_line(line)

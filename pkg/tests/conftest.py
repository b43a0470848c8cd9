"""Collects acceptance-criterion result lines and prints them at the end of
the run, where pytest's capture cannot swallow them."""

collected_criteria: list[str] = []


def record_criterion(line: str) -> None:
    collected_criteria.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if collected_criteria:
        terminalreporter.section("acceptance criteria")
        for line in collected_criteria:
            terminalreporter.line(line)

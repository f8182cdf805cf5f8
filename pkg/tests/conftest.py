import pytest

_LINES: list[str] = []


class CriterionLog:
    """Collects named sub-checks for one acceptance criterion and reports a single PASS/FAIL line."""

    def __init__(self, number: int, title: str):
        self.number, self.title = number, title
        self.checks: list[tuple[str, bool, str]] = []

    def check(self, name: str, ok: bool, detail: str = "") -> bool:
        self.checks.append((name, bool(ok), detail))
        return bool(ok)

    @property
    def ok(self) -> bool:
        return bool(self.checks) and all(ok for _, ok, _ in self.checks)

    def finish(self) -> None:
        status = "PASS" if self.ok else "FAIL"
        bad = [f"{n} ({d})" if d else n for n, ok, d in self.checks if not ok]
        tail = f" failed: {'; '.join(bad)}" if bad else f" {len(self.checks)} checks"
        line = f"criterion {self.number:2d} {status}  {self.title} -{tail}"
        _LINES.append(line)
        print(line)
        assert self.ok, line


@pytest.fixture
def criterion():
    return CriterionLog


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES):
            terminalreporter.write_line(line)

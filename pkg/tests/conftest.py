import sys
import time
from contextlib import contextmanager

_ACCEPTANCE_LINES = []


@contextmanager
def acceptance_criterion(name: str, budget_seconds: float):
    """Times a criterion, records a pass/fail line, enforces the budget."""
    t0 = time.monotonic()
    try:
        yield
    except BaseException:
        elapsed = time.monotonic() - t0
        _ACCEPTANCE_LINES.append(
            f"ACCEPTANCE {name}: FAIL after {elapsed:.1f}s (budget {budget_seconds:.0f}s)"
        )
        raise
    elapsed = time.monotonic() - t0
    line = f"ACCEPTANCE {name}: PASS in {elapsed:.1f}s (budget {budget_seconds:.0f}s)"
    _ACCEPTANCE_LINES.append(line)
    print(line, file=sys.stderr)
    assert elapsed < budget_seconds, f"{name} exceeded its runtime budget"


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

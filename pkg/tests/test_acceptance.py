"""Acceptance criteria, one test each, at the stated tolerances.

Run directly (``python3 tests/test_acceptance.py``) for the PASS/FAIL report
alone; under pytest the same lines appear in the terminal summary.
"""
import pytest

from artifact.validation import CHECKS

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:           # executed as a script
    ACCEPTANCE_LINES = []


@pytest.mark.parametrize("number", sorted(CHECKS))
def test_criterion(number):
    result = CHECKS[number]()
    line = result.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert result.passed, line


if __name__ == "__main__":
    for n in sorted(CHECKS):
        print(CHECKS[n]().line(), flush=True)

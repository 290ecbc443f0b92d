"""Acceptance criteria A1-A11 at their pinned sizes, seeds and tolerances.

Each test prints one PASS/FAIL line; the lines are repeated together in the
terminal summary.  A pass also requires the criterion's runtime budget.
"""

import pytest

from hitkit import verify


def _run(name, acceptance_log):
    result = verify.CHECKS[name]()
    line = result.line()
    print(line)
    acceptance_log.append(line)
    return result


@pytest.mark.parametrize("name", [f"A{i}" for i in range(1, 12)])
def test_criterion(name, acceptance_log):
    result = _run(name, acceptance_log)
    assert result.passed, result.line()


def test_a11_records_resolution(acceptance_log):
    result = verify.check_A11()
    assert "resolution" in result.stats
    assert result.stats["printed_constant_max_rel_err"] > 1e-3

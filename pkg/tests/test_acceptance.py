"""Acceptance gate: one test per criterion at its stated tolerance."""

import pytest

from penning_ising import acceptance
from conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("number", sorted(acceptance.CRITERIA))
def test_criterion(number):
    result = acceptance.CRITERIA[number]()
    line = result.line()
    ACCEPTANCE_LINES.append((number, line))
    print(line)
    assert result.passed, line

"""Acceptance gate: one test and one printed PASS/FAIL line per criterion."""
import pytest

from consist_submod.acceptance import CRITERIA, run_criterion
from consist_submod.rng import DEFAULT_SEED


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    res = run_criterion(number, DEFAULT_SEED)
    with capsys.disabled():
        print(f"\n{res.line()} ({res.seconds:.1f}s)")
    assert res.passed, res.violations[:5]

"""Acceptance criteria 1-10, one pass/fail line each.

Every criterion runs at its stated tolerance and runtime budget.  Lines are
printed even when pytest captures output.
"""

import time

import pytest

from catbitflip.validation import CRITERIA

BUDGET_SECONDS = {1: 1, 2: 60, 3: 60, 4: 120, 5: 900, 6: 600, 7: 600, 8: 120, 9: 300, 10: 60}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    name, fn = CRITERIA[number]
    start = time.perf_counter()
    checks = fn()
    elapsed = time.perf_counter() - start
    failed = [c for c in checks if not c.passed]
    in_budget = elapsed < BUDGET_SECONDS[number]
    ok = not failed and in_budget
    with capsys.disabled():
        print(f"\nCRITERION {number:2d} {'PASS' if ok else 'FAIL'}  {name}  ({len(checks)} checks, {elapsed:.1f} s, budget {BUDGET_SECONDS[number]} s)")
        for c in failed:
            print(f"    failed: {c.name}: measured {c.measured:.4g} vs tolerance {c.tolerance:g} {c.detail}")
    assert not failed, "; ".join(f"{c.name} measured {c.measured:.4g} > {c.tolerance:g} {c.detail}" for c in failed)
    assert in_budget, f"runtime {elapsed:.1f} s exceeds {BUDGET_SECONDS[number]} s"

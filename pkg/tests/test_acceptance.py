"""Acceptance criteria as pytest cases; each prints its PASS/FAIL line."""

import pytest

from liouville_lab.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("cid", sorted(CRITERIA), ids=lambda c: f"C{c}")
def test_criterion(cid):
    r = run_criterion(cid)
    print(f"\n{'PASS' if r.passed else 'FAIL'} C{r.cid} {r.name}: "
          f"{r.detail} [{r.elapsed:.1f}s]")
    assert r.passed, f"C{r.cid} {r.name}: {r.detail}"

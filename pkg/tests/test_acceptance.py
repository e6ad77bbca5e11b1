"""The ten acceptance criteria at their stated tolerances, one pass/fail line each."""

import pytest

from fraclab.acceptance import CRITERIA, TIME_BUDGET, run_all, run_criterion


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k, tmp_path, capsys):
    res = run_criterion(k, tmp_path, seed=0)
    with capsys.disabled():
        print("\n" + res.line())
    assert res.ok, res.detail


def test_full_run_within_budget(tmp_path, capsys):
    results, wall = run_all(tmp_path)
    with capsys.disabled():
        print(f"\nall criteria: {sum(r.ok for r in results)}/{len(results)} in {wall:.1f} s")
    assert len(results) == 10 and all(r.ok for r in results)
    assert wall <= TIME_BUDGET

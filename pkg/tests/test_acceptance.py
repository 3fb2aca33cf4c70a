"""Exit criteria; each check prints one PASS/FAIL line (shown even under output capture)."""

import pytest

from photon_sim.acceptance import CRITERIA


@pytest.mark.acceptance
@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    checks = CRITERIA[number]()
    with capsys.disabled():
        print()
        for check in checks:
            print(check.line())
    failed = [c.line() for c in checks if not c.passed]
    assert not failed, "\n".join(failed)

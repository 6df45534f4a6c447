"""Exit criteria; each test prints one PASS/FAIL line (run with ``-s`` to see them)."""

import pytest

from dirlab import acceptance


@pytest.mark.parametrize("criterion", acceptance.CRITERIA, ids=lambda f: f.__name__)
def test_criterion(criterion, capsys):
    result = criterion()
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.line()

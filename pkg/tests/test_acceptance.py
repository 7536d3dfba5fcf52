"""Acceptance criteria 1-10, one test each, in the same order as ``optoqht validate``.

Each test prints a single ``[PASS]``/``[FAIL]`` line followed by the
individual measurements behind it.
"""
import pytest

from optoqht.validation import ORDER


@pytest.mark.parametrize("check", ORDER, ids=[f"criterion_{fn.criterion}" for fn in ORDER])
def test_criterion(check, capsys):
    res = check()
    with capsys.disabled():
        print()
        print(res.line())
        for d in res.details:
            print("    " + d)
    assert res.passed, "\n".join(res.details)

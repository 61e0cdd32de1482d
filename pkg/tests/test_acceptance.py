"""Acceptance gate: every criterion at its stated tolerance, one line each.

The criteria live in dms.acceptance so the `dms verify` command and this
module run exactly the same checks.
"""

import pytest

from dms import acceptance


@pytest.mark.parametrize("index", range(1, len(acceptance.CRITERIA) + 1),
                         ids=[name for name, _ in acceptance.CRITERIA])
def test_criterion(index):
    result = acceptance.run_criterion(index)
    print(result.line())
    assert result.passed, result.detail

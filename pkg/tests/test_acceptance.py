"""
The twelve acceptance criteria at their stated tolerances.

Run with ``pytest -s tests/test_acceptance.py`` to see one PASS/FAIL line
per criterion; the same table is printed by ``conebalance verify``.
"""

import pytest

from conebalance import acceptance

from conftest import ACCEPTANCE_LINES

CRITERIA = range(1, len(acceptance.CHECKS) + 1)


@pytest.fixture(scope="module")
def results(request):
    out = {r.number: r for r in acceptance.run_all()}
    # printed again in the terminal summary, where output capture does not hide it
    request.config.stash[ACCEPTANCE_LINES] = [r.line() for r in out.values()]
    return out


@pytest.mark.parametrize("number", CRITERIA)
def test_criterion(results, number):
    r = results[number]
    print(r.line())
    assert r.passed, r.detail

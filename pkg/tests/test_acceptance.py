"""One test per acceptance criterion, each with its time budget.

Run directly (``python tests/test_acceptance.py``) for a plain report, or
under pytest, where the same lines appear in the terminal summary.
"""

import sys

import pytest

from zipperlogic.verify import run_suite

# (criterion, suite, budget in seconds; None means no stated budget)
CRITERIA = [
    (1, "theorem-a", 5.0),
    (2, "theorem-b", 10.0),
    (3, "theorem-c", 10.0),
    (4, "theorem-d", 10.0),
    (5, "multiplier", 10.0),
    (6, "death", 10.0),
    (7, "beta", None),
    (8, "reversibility", 30.0),
    (9, "fuzz", 60.0),
    (10, "knots", None),
    (11, "serialization", None),
]

REPORT: list[str] = []


def check(number, suite, budget):
    res = run_suite(suite)
    failed = [c for c in res.cases if not c.passed]
    in_time = budget is None or res.seconds < budget
    ok = res.passed and in_time and bool(res.cases)
    limit = f" (budget {budget:g}s)" if budget is not None else ""
    line = (
        f"criterion {number:2d} {suite:<14} {'PASS' if ok else 'FAIL'} "
        f"{len(res.cases) - len(failed)}/{len(res.cases)} cases in {res.seconds:.2f}s{limit}"
    )
    return ok, line, failed


@pytest.mark.parametrize("number,suite,budget", CRITERIA, ids=[s for _, s, _ in CRITERIA])
def test_criterion(number, suite, budget):
    ok, line, failed = check(number, suite, budget)
    REPORT.append(line)
    print(line)
    assert ok, line + "".join(f"\n  {c.name}: {c.detail}" for c in failed[:5])


if __name__ == "__main__":
    results = [check(*c) for c in CRITERIA]
    for _, line, failed in results:
        print(line)
        for c in failed[:5]:
            print(f"    {c.name}: {c.detail}")
    sys.exit(0 if all(ok for ok, _, _ in results) else 1)

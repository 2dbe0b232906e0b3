"""Acceptance criteria 1-10, one summary line per criterion.

Run directly (``python3 tests/test_acceptance.py``) or through pytest; in
pytest the summary lines are written past output capture.
"""
import time

import pytest

from spinr import verify

TITLES = {
    1: "minimal-structure table",
    2: "hermitian spin^c invariant spinors",
    3: "hermitian purity and parallelism",
    4: "Ricci constants",
    5: "symplectic special spinors",
    6: "generalised Killing spinors",
    7: "Nomizu map cross-check",
    8: "HP^n construction",
    9: "OP^2 representation theory",
    10: "property suites",
}


def run_criterion(i):
    start = time.perf_counter()
    checks = verify.CRITERIA[i]()
    ok = bool(checks) and all(c.passed for c in checks)
    summary = f"criterion {i:2d} [{'PASS' if ok else 'FAIL'}] {TITLES[i]} ({len(checks)} checks, " \
              f"{time.perf_counter() - start:.1f} s)"
    return ok, summary, checks


@pytest.mark.parametrize("i", sorted(verify.CRITERIA))
def test_criterion(i, capsys):
    ok, summary, checks = run_criterion(i)
    with capsys.disabled():
        print(f"\n{summary}")
        for c in checks:
            if not c.passed:
                print(f"    {c.line()}")
    assert ok, "\n".join(c.line() for c in checks if not c.passed)


if __name__ == "__main__":
    results = [run_criterion(i) for i in sorted(verify.CRITERIA)]
    for ok, summary, checks in results:
        print(summary)
        for c in checks:
            print(f"    {c.line()}")
    raise SystemExit(0 if all(ok for ok, _, _ in results) else 1)

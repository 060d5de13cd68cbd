"""Acceptance criteria, one test each, printing a PASS/FAIL line per check.

Thresholds and time budgets are pinned here and compared against the values
the oracle module reports, so a loosened oracle fails loudly. Run directly
with ``python3 tests/test_acceptance.py`` for the summary without pytest.
"""

import sys

import pytest

from commuting_rmt.verify import run_check

# criterion -> [(check name, max measured error, time budget in seconds)], plus a shared budget
CRITERIA = {
    1: ("Gamma determinant", [("gamma-det", 1e-10, 1.0)], 1.0),
    2: ("radial integral", [("radial-integral", 1e-8, 1.0)], 1.0),
    3: ("Hermitian chart Gram ratios", [("hermitian-chart", 1e-3, 30.0)], 30.0),
    4: ("non-Hermitian chart Gram vs |det Gamma|", [("nonhermitian-chart", 1e-3, 30.0)], 30.0),
    5: (
        "2x2 density end-to-end",
        [("integrand-quadrature", 1e-4, 300.0), ("density-2x2-mcmc", 0.02, 300.0)],
        300.0,
    ),
    6: ("semicircle at n = 64", [("semicircle", 0.05, 600.0)], 600.0),
    7: (
        "projection laws",
        [("projection-laws", 0.03, 60.0), ("projection-normalization", 1e-8, 60.0)],
        60.0,
    ),
    8: (
        "minimizer supports",
        [("minimizer-disk", 0.05, 300.0), ("minimizer-sphere", 0.02, 300.0), ("minimizer-gap", 1e-6, 60.0)],
        300.0,
    ),
    9: ("exact combinatorics", [("combinatorics", 0.0, 1.0)], 1.0),
    10: (
        "property suites",
        [
            ("hoffman-wielandt", 1e-9, 60.0),
            ("round-trip", 1e-8, 60.0),
            ("permutation-invariance", 1e-12, 60.0),
            ("attraction", 0.0, 60.0),
        ],
        60.0,
    ),
}


def evaluate(number):
    title, checks, total_budget = CRITERIA[number]
    lines, ok, total = [], True, 0.0
    for name, tol, budget in checks:
        res = run_check(name, seed=0)
        total += res.elapsed
        passed = res.passed and res.threshold == tol and res.budget == budget
        ok &= passed
        lines.append(
            f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2} {title}: {name} "
            f"error {res.measured:.3e} (limit {tol:.0e}), {res.elapsed:.2f}s (limit {budget:.0f}s); {res.detail}"
        )
    within = total <= total_budget
    ok &= within
    lines.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2} overall, {total:.2f}s of {total_budget:.0f}s")
    return ok, lines


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    ok, lines = evaluate(number)
    with capsys.disabled():
        print()
        for line in lines:
            print(line)
    assert ok, "\n".join(lines)


if __name__ == "__main__":
    failures = 0
    for number in sorted(CRITERIA):
        ok, lines = evaluate(number)
        failures += not ok
        print("\n".join(lines), flush=True)
    sys.exit(1 if failures else 0)

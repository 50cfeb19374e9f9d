"""Acceptance suite: one test per advertised guarantee, each printing a
pass/fail line.  The checks are the same ones the `cassis verify` command
runs; runtime budgets are asserted where stated.
"""

import time

import pytest

from cassis.verify import (
    TOTAL_BUDGET_SECONDS,
    check_cycle_exclusion,
    check_decision_table,
    check_hj_roundtrip,
    check_koenigs_equivalence,
    check_nonresonant_linearization,
    check_orbifold_table,
    check_poincare_dulac_exactness,
    check_propagation_soundness,
    run_all,
)


def _report(name, passed, detail, seconds):
    status = "PASS" if passed else "FAIL"
    print(f"{status}  {name}: {detail} ({seconds:.2f}s)")
    assert passed, f"{name}: {detail}"


def test_criterion_1_poincare_dulac_exactness():
    start = time.perf_counter()
    passed, detail = check_poincare_dulac_exactness()
    elapsed = time.perf_counter() - start
    _report("poincare-dulac-exactness", passed, detail, elapsed)
    assert elapsed < 30.0, f"criterion 1 exceeded its 30s budget: {elapsed:.1f}s"


def test_criterion_2_nonresonant_linearization():
    start = time.perf_counter()
    passed, detail = check_nonresonant_linearization()
    _report("nonresonant-linearization", passed, detail, time.perf_counter() - start)


def test_criterion_3_koenigs_equivalence():
    start = time.perf_counter()
    passed, detail = check_koenigs_equivalence()
    _report("koenigs-equivalence", passed, detail, time.perf_counter() - start)


def test_criterion_4_hj_roundtrip():
    start = time.perf_counter()
    passed, detail = check_hj_roundtrip(200)
    elapsed = time.perf_counter() - start
    _report("hj-roundtrip", passed, detail, elapsed)
    assert elapsed < 10.0, f"criterion 4 exceeded its 10s budget: {elapsed:.1f}s"


def test_criterion_5_cycle_exclusion():
    start = time.perf_counter()
    passed, detail = check_cycle_exclusion(runs=1000)
    _report("cycle-exclusion", passed, detail, time.perf_counter() - start)


def test_criterion_6_propagation_soundness():
    start = time.perf_counter()
    passed, detail = check_propagation_soundness(runs=200)
    _report("propagation-soundness", passed, detail, time.perf_counter() - start)


def test_criterion_7_orbifold_table():
    start = time.perf_counter()
    passed, detail = check_orbifold_table(runs=500)
    _report("orbifold-table", passed, detail, time.perf_counter() - start)


def test_criterion_8_decision_table():
    start = time.perf_counter()
    passed, detail = check_decision_table()
    _report("decision-table", passed, detail, time.perf_counter() - start)


def test_criterion_9_full_suite_within_budget():
    start = time.perf_counter()
    results = run_all()
    elapsed = time.perf_counter() - start
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name} ({r.seconds:.2f}s)")
    assert all(r.passed for r in results)
    print(f"PASS  total-runtime: {elapsed:.2f}s of {TOTAL_BUDGET_SECONDS:.0f}s")
    assert elapsed < TOTAL_BUDGET_SECONDS

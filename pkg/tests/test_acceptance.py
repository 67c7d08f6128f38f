"""Acceptance gate: one test per exit criterion, printing its report line.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
pass/fail lines (or use the ``darkpath validate`` CLI, which shares the
same implementations).

Criterion 7's eta-ordering clause is asserted exactly as specified and is
expected to fail: under the stated equal-peak calibration the dressed
(eta = 4) loop runs ~3.4x longer and carries strictly more dephasing
exposure than the undressed one, so its eps = 0 dissipative fidelity
cannot exceed the eta = 0 value.  See the test docstring and the
decisions ledger for the quantitative argument; the remaining clauses of
that criterion do pass.
"""

import pytest

from darkpath import acceptance


def _run(criterion) -> None:
    result = criterion()
    print()
    print(result.report())
    assert result.passed, "\n" + result.report()


def test_criterion_01_holonomy_reconstruction():
    _run(acceptance.criterion_1)


def test_criterion_02_dark_path_invariants():
    _run(acceptance.criterion_2)


def test_criterion_03_cnot_error_sweep():
    _run(acceptance.criterion_3)


def test_criterion_04_cz_error_sweep():
    _run(acceptance.criterion_4)


def test_criterion_05_ccnot_error_sweep():
    _run(acceptance.criterion_5)


def test_criterion_06_cross_gate_ordering():
    _run(acceptance.criterion_6)


def test_criterion_07_dissipative_ordering():
    """Asserted as specified; the eta-ordering clause is a known physics
    conflict with the stated calibration (see module docstring)."""
    _run(acceptance.criterion_7)


def test_criterion_08_full_vs_effective():
    _run(acceptance.criterion_8)


def test_criterion_09_physicality_suite():
    _run(acceptance.criterion_9)


def test_criterion_10_oracle_suite():
    _run(acceptance.criterion_10)

"""Runs every acceptance criterion at its stated tolerance and prints one line per criterion."""

import pytest

from qrepseal.acceptance import run_criteria


@pytest.fixture(scope="module")
def results():
    return {r.number: r for r in run_criteria()}


@pytest.mark.parametrize("number", range(1, 12))
def test_criterion(results, number, capsys):
    r = results[number]
    with capsys.disabled():
        print("\n" + r.line())
    bad = [c for c in r.checks if not c.passed] + [lab for lab, ok in r.flags if not ok]
    assert r.passed, bad


def test_all_criteria_present(results):
    assert sorted(results) == list(range(1, 12))

"""
Unit tests for d-diagram enumeration and base-case verification.

Core claims:
    - enumerate_diagrams yields each staircase of a cardinality exactly once
    - Proper d-diagrams at six nodes number 3, 11, 44 for d = 2, 3, 4
    - Base-case lists for d = 2, 3, 4 have 3, 11 and 9 diagrams, all certified
    - The 1-step problem for k nodes of order d fails only at k = 2 and k = 5
"""

import pytest
from sympy import Rational

from hermite_staircase.diagrams import (
    DiagramError,
    StaircaseDiagram,
    is_proper,
    is_safely_proper,
    triangular,
)
from hermite_staircase.enumeration import (
    basecase_list,
    count_row,
    decide_one_step,
    default_source_nodes,
    enumerate_d_diagrams,
    enumerate_diagrams,
    reduce_to_basecases,
    reduction_path,
    sound_source_nodes,
    verify_basecases,
)
from hermite_staircase.interp import VerdictKind
from hermite_staircase.settings import RunConfig


# -- Helpers -----------------------------------------------------------------

def _compositions(total, level=1):
    """Positive sequences with entry i at most i and the given sum."""
    if total == 0:
        yield ()
        return
    for first in range(1, min(total, level) + 1):
        for rest in _compositions(total - first, level + 1):
            yield (first,) + rest


def _brute_force(cardinality, max_steps):
    """Every composition accepted as a staircase type."""
    found = set()
    for entries in _compositions(cardinality):
        try:
            diagram = StaircaseDiagram(entries)
        except DiagramError:
            continue
        if diagram.steps <= max_steps:
            found.add(diagram)
    return found


# == 1. Generation ==========================================================

class TestGeneration:
    @pytest.mark.parametrize("cardinality,max_steps", [(6, 2), (9, 2), (10, 3), (12, 3)])
    def test_matches_brute_force(self, cardinality, max_steps):
        listed = list(enumerate_diagrams(cardinality, max_steps))
        assert len(listed) == len(set(listed))
        assert set(listed) == _brute_force(cardinality, max_steps)

    def test_lexicographic(self):
        listed = [d.entries for d in enumerate_d_diagrams(3, 6)]
        assert listed == sorted(listed)

    @pytest.mark.parametrize("d,count", [(2, 3), (3, 11), (4, 44)])
    def test_proper_counts_at_six_nodes(self, d, count):
        assert sum(1 for _ in enumerate_d_diagrams(d, 6, "proper")) == count

    def test_filters(self):
        every = set(enumerate_d_diagrams(3, 8))
        proper = set(enumerate_d_diagrams(3, 8, "proper"))
        safe = set(enumerate_d_diagrams(3, 8, "safelyProper"))
        assert safe <= proper <= every
        assert all(is_proper(x, 3) for x in proper)
        assert all(is_safely_proper(x, 3) for x in safe)

    def test_unknown_filter(self):
        with pytest.raises(ValueError):
            list(enumerate_d_diagrams(2, 3, "lovely"))


# == 2. Base cases ==========================================================

class TestBasecases:
    def test_source_nodes(self):
        assert default_source_nodes(2, 6) == 6
        assert default_source_nodes(4, 6) == 13
        assert sound_source_nodes(4, 13)
        assert not sound_source_nodes(4, 5)

    def test_terminals_are_proper(self):
        terminals = reduce_to_basecases(4, 13, 6)
        assert len(terminals) == 6
        assert all(t.cardinality == 60 and is_proper(t, 4) for t in terminals)

    @pytest.mark.slow
    def test_quintic_terminals(self):
        terminals = reduce_to_basecases(5, 20, 6)
        assert len(terminals) == 5
        assert all(t.cardinality == 90 and is_proper(t, 5) for t in terminals)

    def test_bad_target(self):
        with pytest.raises(DiagramError):
            reduce_to_basecases(2, 6, 6)

    @pytest.mark.parametrize("d,size", [(2, 3), (3, 11), (4, 9)])
    def test_list_sizes(self, d, size):
        assert len(list(basecase_list(d, 6))) == size

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_basecases_pass(self, d):
        report = verify_basecases(d, d, 6, RunConfig())
        assert report.passed, [str(f) for f in report.failures]
        assert report.sound
        assert all(v.kind is VerdictKind.CERTIFIED_CORRECT for v in report.verdicts.values())

    def test_fail_fast_agrees(self):
        report = verify_basecases(2, 2, 6, RunConfig(), fail_fast=True)
        assert report.passed
        assert report.total == 3

    def test_proper_family(self):
        report = verify_basecases(2, 2, 6, RunConfig(), family="proper", strict=False)
        assert report.total == sum(1 for _ in enumerate_diagrams(6 * triangular(2), 2)) == 3
        assert report.passed

    def test_step_bound_below_d(self):
        with pytest.raises(DiagramError):
            verify_basecases(3, 2, 6)

    def test_count_row(self):
        row = count_row(4, 13, 6)
        assert row["proper_k2"] == 44
        assert row["basecases"] == 9


# == 3. One-step problems ===================================================

class TestDecideOneStep:
    def test_path_stays_proper(self):
        terminal, steps = reduction_path(3, 8)
        assert steps
        assert all(is_proper(step.before, 3) for step in steps)
        assert terminal == steps[-1].after

    @pytest.mark.parametrize("k", range(1, 21))
    def test_conics(self, k):
        verdict = decide_one_step(2, k, RunConfig())
        assert verdict.correct is (k not in (2, 5))

    @pytest.mark.parametrize("k", range(1, 13))
    def test_cubics(self, k):
        verdict = decide_one_step(3, k, RunConfig())
        assert verdict.correct is (k not in (2, 5))

    @pytest.mark.parametrize("k", range(1, 8))
    def test_simple_nodes(self, k):
        assert decide_one_step(1, k, RunConfig()).correct

    def test_two_conics_are_certified_incorrect(self):
        assert decide_one_step(2, 2, RunConfig()).kind is VerdictKind.CERTIFIED_INCORRECT

    def test_five_conics_error_bound(self):
        verdict = decide_one_step(2, 5, RunConfig())
        assert not verdict.correct
        assert verdict.error_bound < Rational(1, 10 ** 20)

    @pytest.mark.slow
    def test_degree_ten_basecases_fail_at_six_nodes(self):
        report = verify_basecases(10, 10, 6, RunConfig(trials=2), source_nodes=6, fail_fast=True)
        assert not report.passed
        assert not report.sound

    @pytest.mark.slow
    def test_degree_ten_needs_seven_nodes(self):
        config = RunConfig(trials=2)
        assert not decide_one_step(10, 6, config).correct
        assert decide_one_step(10, 7, config).correct

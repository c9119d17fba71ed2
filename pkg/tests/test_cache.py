"""
Unit tests for the verdict cache.

Core claims:
    - A verdict is stored once per problem and verdict-relevant settings
    - Reloading the file restores verdicts with their own prime and trial count
    - check() answers from the cache before computing
    - Unreadable lines are skipped
"""

import json
from dataclasses import replace

import pytest

from hermite_staircase.cache import VerdictCache, check
from hermite_staircase.diagrams import StaircaseDiagram
from hermite_staircase.interp import VerdictKind, is_generically_correct, problem_for
from hermite_staircase.settings import RunConfig


# -- Helpers -----------------------------------------------------------------

def _problem():
    return problem_for([2, 2, 2], StaircaseDiagram.parse("(~3,3)"))


# == 1. Storage =============================================================

class TestVerdictCache:
    def test_put_and_reload(self, tmp_path):
        path = tmp_path / "cache" / "verdicts.jsonl"
        config = RunConfig()
        first = check(_problem(), config, VerdictCache(str(path)))
        assert first.kind is VerdictKind.CERTIFIED_CORRECT

        reloaded = VerdictCache(str(path)).get(_problem(), config)
        assert reloaded == first
        assert reloaded.prime == config.prime
        assert reloaded.trials == first.trials

    def test_one_line_per_key(self, tmp_path):
        path = tmp_path / "verdicts.jsonl"
        cache = VerdictCache(str(path))
        config = RunConfig()
        check(_problem(), config, cache)
        check(_problem(), config, cache)
        assert len(path.read_text().splitlines()) == 1

    def test_seed_is_part_of_the_key(self, tmp_path):
        cache = VerdictCache(str(tmp_path / "verdicts.jsonl"))
        check(_problem(), RunConfig(), cache)
        assert cache.get(_problem(), RunConfig(seed=1)) is None

    @pytest.mark.parametrize("field", ["exact_threshold", "exact_variables", "budget"])
    def test_fallback_settings_are_part_of_the_key(self, tmp_path, field):
        cache = VerdictCache(str(tmp_path / "verdicts.jsonl"))
        check(_problem(), RunConfig(), cache)
        assert cache.get(_problem(), replace(RunConfig(), **{field: 1})) is None

    def test_exact_fallback_is_not_shadowed(self, tmp_path):
        path = str(tmp_path / "verdicts.jsonl")
        problem = problem_for([2, 2], StaircaseDiagram.parse("(~3)"))
        quick = check(problem, RunConfig(exact_threshold=0), VerdictCache(path))
        assert quick.kind is VerdictKind.PROBABLY_INCORRECT

        full = check(problem, RunConfig(), VerdictCache(path))
        assert full.kind is VerdictKind.CERTIFIED_INCORRECT
        assert full == is_generically_correct(problem, RunConfig())
        assert len(list(VerdictCache(path).records())) == 2

    def test_hit_skips_computation(self, tmp_path, monkeypatch):
        cache = VerdictCache(str(tmp_path / "verdicts.jsonl"))
        check(_problem(), RunConfig(), cache)

        def fail(*args, **kwargs):
            raise AssertionError("recomputed a cached verdict")

        monkeypatch.setattr("hermite_staircase.cache.is_generically_correct", fail)
        assert check(_problem(), RunConfig(), cache).correct

    def test_stats_and_clear(self, tmp_path):
        cache = VerdictCache(str(tmp_path / "verdicts.jsonl"))
        check(_problem(), RunConfig(), cache)
        assert cache.stats() == {"entries": 1, "CertifiedCorrect": 1}
        cache.clear()
        assert cache.stats() == {"entries": 0}
        assert not (tmp_path / "verdicts.jsonl").exists()

    def test_unreadable_lines_are_skipped(self, tmp_path):
        path = tmp_path / "verdicts.jsonl"
        cache = VerdictCache(str(path))
        check(_problem(), RunConfig(), cache)
        with open(path, "a") as f:
            f.write("{not json\n")
        records = list(VerdictCache(str(path)).records())
        assert len(records) == 1
        assert json.loads(path.read_text().splitlines()[0])["kind"] == "CertifiedCorrect"

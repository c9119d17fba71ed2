"""
Append-only JSON-lines store of verdicts, keyed on the problem hash and the
run settings that produced them.
"""

import json
import logging
import os
from typing import Any, Dict, Iterator, Optional, Tuple

from .interp import InterpProblem, Verdict, is_generically_correct
from .settings import RunConfig

logger = logging.getLogger(__name__)

# RunConfig fields that can change a verdict
KEY_FIELDS = ("prime", "seed", "trials", "exact_threshold", "exact_variables", "budget")

CacheKey = Tuple[Any, ...]


class VerdictCache:
    def __init__(self, path: str):
        self.path = path
        self._entries: Optional[Dict[CacheKey, Verdict]] = None

    def _load(self) -> Dict[CacheKey, Verdict]:
        if self._entries is None:
            self._entries = {}
            for record in self.records():
                key = (record["problem"],) + tuple(record.get(field) for field in KEY_FIELDS)
                self._entries[key] = Verdict.from_record(
                    dict(record, prime=record.get("verdict_prime"), trials=record.get("verdict_trials", record["trials"]))
                )
        return self._entries

    def records(self) -> Iterator[Dict]:
        if not os.path.exists(self.path):
            return
        with open(self.path) as f:
            for number, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    yield json.loads(line)
                except json.JSONDecodeError:
                    logger.warning("skipping unreadable cache line %d in %s", number, self.path)

    @staticmethod
    def key(problem: InterpProblem, config: RunConfig) -> CacheKey:
        return (problem.key(),) + tuple(getattr(config, field) for field in KEY_FIELDS)

    def get(self, problem: InterpProblem, config: RunConfig) -> Optional[Verdict]:
        return self._load().get(self.key(problem, config))

    def put(self, problem: InterpProblem, config: RunConfig, verdict: Verdict):
        key = self.key(problem, config)
        entries = self._load()
        if key in entries:
            return
        entries[key] = verdict
        record = dict(zip(("problem",) + KEY_FIELDS, key))
        record.update({k: v for k, v in verdict.to_record().items() if k not in ("prime", "trials")})
        record["verdict_prime"] = verdict.prime
        record["verdict_trials"] = verdict.trials
        directory = os.path.dirname(self.path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(self.path, "a") as f:
            f.write(json.dumps(record, sort_keys=True) + "\n")

    def stats(self) -> Dict[str, int]:
        counts: Dict[str, int] = {"entries": 0}
        for verdict in self._load().values():
            counts["entries"] += 1
            counts[verdict.kind.value] = counts.get(verdict.kind.value, 0) + 1
        return counts

    def clear(self):
        if os.path.exists(self.path):
            os.remove(self.path)
        self._entries = {}


def check(problem: InterpProblem, config: RunConfig, cache: Optional[VerdictCache] = None) -> Verdict:
    """is_generically_correct, reusing a cached verdict when one exists."""
    if cache is not None:
        hit = cache.get(problem, config)
        if hit is not None:
            logger.debug("cache hit for %s", problem.key()[:12])
            return hit
    verdict = is_generically_correct(problem, config)
    if cache is not None:
        cache.put(problem, config, verdict)
    return verdict

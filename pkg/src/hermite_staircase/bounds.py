"""
Dimension formulas, closed-form bounds and the search for exceptional
mixed problems.

A count vector (p_0, ..., p_m) stands for p_j nodes carrying F_{j+1}, i.e.
p_j singularities of order j, interpolated on the 1-step diagram of the
total number of conditions.
"""

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .cache import VerdictCache, check
from .diagrams import HermiteError, StaircaseDiagram, is_proper, one_step_diagram, triangular
from .interp import Verdict, VerdictKind, is_generically_correct, problem_for
from .reduction import NotReducibleError, degred, reduce
from .settings import RunConfig

logger = logging.getLogger(__name__)

Counts = Tuple[int, ...]


class BoundsError(HermiteError, ValueError):
    """Arguments outside the range a bound is stated for."""


class BudgetExceededError(BoundsError):
    """A search box is larger than the configured budget."""


"""--- Closed forms ---"""


@dataclass(frozen=True)
class SingularitySpec:
    degree: int
    counts: Counts

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(self.counts))
        if self.degree < 0 or not self.counts or min(self.counts) < 0:
            raise BoundsError("degree and counts must be non-negative, with at least one count")

    @property
    def m(self) -> int:
        return len(self.counts) - 1


def expected_dimension(spec: SingularitySpec) -> int:
    d = spec.degree
    conditions = sum(p * triangular(j + 1) for j, p in enumerate(spec.counts))
    return max(0, (d + 1) * (d + 2) // 2 - conditions)


def r_bound(m: int, k: int) -> int:
    if not 0 <= k <= 12 or k > m:
        raise BoundsError(f"r(m,k) is bounded for 0 <= k <= min(m, 12), got m={m}, k={k}")
    numerator = 4 * (m + 1) * (2 * m + 1)
    denominator = (k + 1) * (k + 2)
    return max(6 * (m + 1), -(-numerator // denominator))


@dataclass(frozen=True)
class MixedBound:
    d: int
    D: int
    p: int
    h: int
    q: int


def mixed_q(d: int, D: int, p: int) -> MixedBound:
    """Least h with h >= 2D and h(h+1) > (p-1)d(d+1); least q above (h(h-1) + 2D(h-1)) / (d(d+1))."""
    if not 1 <= d <= D or p < 1:
        raise BoundsError("mixed_q needs 1 <= d <= D and p >= 1")
    h = 2 * D
    while h * (h + 1) <= (p - 1) * d * (d + 1):
        h += 1
    q = (h * (h - 1) + 2 * D * (h - 1)) // (d * (d + 1)) + 1
    return MixedBound(d, D, p, h, q)


"""--- Mixed problems ---"""


def _orders(counts: Sequence[int]) -> List[int]:
    return [j + 1 for j, count in enumerate(counts) for _ in range(count)]


def mixed_cardinality(counts: Sequence[int]) -> int:
    return sum(count * triangular(j + 1) for j, count in enumerate(counts))


def decide_mixed(
    counts: Sequence[int],
    config: Optional[RunConfig] = None,
    cache: Optional[VerdictCache] = None,
) -> Verdict:
    """Is the mixed problem on its 1-step diagram generically correct?

    Searches for licensed reductions, largest order first, that empty the
    diagram. A state no reduction applies to is settled by a cheap
    determinant probe. When the search fails the whole problem is checked.
    """
    counts = tuple(counts)
    if any(count < 0 for count in counts):
        raise BoundsError("counts must be non-negative")
    config = config or RunConfig()
    total = mixed_cardinality(counts)
    if total == 0:
        return Verdict(VerdictKind.CERTIFIED_CORRECT, 0, None, 0, method="empty")
    start = one_step_diagram(total)
    probe = config.probe()
    memo: Dict[Tuple[StaircaseDiagram, Counts], bool] = {}

    def settle(diagram: StaircaseDiagram, remaining: Counts) -> bool:
        if not any(remaining):
            return diagram.cardinality == 0
        key = (diagram, remaining)
        if key in memo:
            return memo[key]
        settled = False
        moved = False
        for j in reversed(range(len(remaining))):
            if not remaining[j] or not is_proper(diagram, j + 1, check_divisibility=False):
                continue
            try:
                step = reduce(diagram, j + 1)
            except NotReducibleError:
                continue
            moved = True
            if settle(step.after, remaining[:j] + (remaining[j] - 1,) + remaining[j + 1:]):
                settled = True
                break
        if not moved:
            settled = is_generically_correct(problem_for(_orders(remaining), diagram), probe).correct
        memo[key] = settled
        return settled

    if settle(start, counts):
        return Verdict(VerdictKind.CERTIFIED_CORRECT, probe.trials, probe.prime, degred(start.points), method="reduction")
    logger.debug("no reduction settles %s; checking directly", counts)
    return check(problem_for(_orders(counts), start), config, cache)


def _decide_job(args) -> Tuple[Counts, bool]:
    counts, config = args
    return counts, decide_mixed(counts, config).correct


# every d-diagram problem for this many F_d nodes is generically correct, d <= 13
BASE_NODES = 7


def default_ceilings(m: int) -> List[int]:
    """Largest p_k an exceptional vector of row m can have.

    With D = m + 1 and d = k + 1, p_k >= mixed_q(d, D, 7).q makes the problem
    correct, and r_bound caps p_k as well.
    """
    if m < 0:
        raise BoundsError("m must be non-negative")
    ceilings = []
    for k in range(m + 1):
        ceiling = mixed_q(k + 1, m + 1, BASE_NODES).q - 1
        if k <= 12:
            ceiling = min(ceiling, r_bound(m, k))
        ceilings.append(ceiling)
    return ceilings


def exceptional_vectors(
    m: int,
    config: Optional[RunConfig] = None,
    ceilings: Optional[Sequence[int]] = None,
    cache: Optional[VerdictCache] = None,
) -> List[Counts]:
    """Count vectors in the box p_j <= ceilings[j] whose 1-step problem is not generically correct."""
    config = config or RunConfig()
    ceilings = list(default_ceilings(m) if ceilings is None else ceilings)
    if len(ceilings) != m + 1:
        raise BoundsError(f"{m + 1} ceilings needed, got {len(ceilings)}")
    size = math.prod(c + 1 for c in ceilings)
    if size > config.budget:
        raise BudgetExceededError(f"{size} count vectors exceed the budget of {config.budget}")
    box = list(itertools.product(*(range(c + 1) for c in ceilings)))
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as executor:
            results = dict(executor.map(_decide_job, [(v, config) for v in box], chunksize=16))
    else:
        results = {v: decide_mixed(v, config, cache).correct for v in box}
    exceptions = [v for v in box if not results[v]]
    logger.info("m=%d: %d of %d vectors are exceptional", m, len(exceptions), size)
    return exceptions


def r_row(
    m: int,
    config: Optional[RunConfig] = None,
    ceilings: Optional[Sequence[int]] = None,
    cache: Optional[VerdictCache] = None,
) -> List[int]:
    """r(m,k) for k = 0..m from a single search of the box."""
    exceptions = exceptional_vectors(m, config, ceilings, cache)
    return [max((v[k] for v in exceptions), default=0) for k in range(m + 1)]


def search_r(
    m: int,
    k: int,
    ceiling: Optional[int] = None,
    config: Optional[RunConfig] = None,
    cache: Optional[VerdictCache] = None,
) -> int:
    """Largest p_k among exceptional count vectors of row m, 0 when there are none."""
    if not 0 <= k <= m:
        raise BoundsError("search_r needs 0 <= k <= m")
    ceilings = None if ceiling is None else [ceiling] * (m + 1)
    return r_row(m, config, ceilings, cache)[k]


def exceptional_mixed_triples(
    max_order: int = 3,
    config: Optional[RunConfig] = None,
    cache: Optional[VerdictCache] = None,
    ceilings: Optional[Sequence[int]] = None,
) -> List[Counts]:
    """Exceptional vectors whose entry i counts nodes carrying F_i, i = 1..max_order."""
    if not 1 <= max_order <= 3:
        raise BoundsError("max_order must be 1, 2 or 3")
    return exceptional_vectors(max_order - 1, config, ceilings, cache)

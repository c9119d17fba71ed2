"""
The d-reduction calculus: v-sequences, reduction steps, chains and the
exceptional sets they remove.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .diagrams import (
    DiagramError,
    HermiteError,
    MultiIndex,
    StaircaseDiagram,
    graded_key,
    is_proper,
    normalize_for_d,
    triangular,
)

logger = logging.getLogger(__name__)

VSequence = Tuple[int, ...]


class NotReducibleError(HermiteError):
    """The diagram admits no v-sequence."""

    def __init__(self, diagram: StaircaseDiagram, d: int, partial: Optional["ReductionChain"] = None):
        super().__init__(f"{diagram} is not {d}-reducible")
        self.diagram = diagram
        self.d = d
        self.partial = partial


class InvalidReductionError(HermiteError, ValueError):
    """The given v-sequence is not a reduction of the diagram."""


class InstanceTooLargeError(HermiteError):
    """An exhaustive check would exceed its budget."""


@dataclass(frozen=True)
class ReductionStep:
    before: StaircaseDiagram
    v: VSequence
    after: StaircaseDiagram
    removed: FrozenSet[MultiIndex]
    d: int
    licensed: bool = False
    """True when `before` is proper and `v` is canonical, so `removed` is exceptional."""

    @property
    def degred(self) -> int:
        return degred(self.removed)

    def __str__(self) -> str:
        return f"{self.before} -> {self.after} [v=({','.join(str(x) for x in self.v)})]"


@dataclass(frozen=True)
class ReductionChain:
    start: StaircaseDiagram
    d: int
    steps: Tuple[ReductionStep, ...] = ()

    @property
    def terminal(self) -> StaircaseDiagram:
        return self.steps[-1].after if self.steps else self.start

    @property
    def licensed(self) -> bool:
        return all(step.licensed for step in self.steps)

    def arrow(self) -> str:
        return " -> ".join(str(x) for x in [self.start] + [step.after for step in self.steps])

    def lines(self) -> List[str]:
        return [str(step) for step in self.steps]

    def __len__(self) -> int:
        return len(self.steps)


def canonical_v(diagram: StaircaseDiagram, d: int) -> VSequence:
    """v_d first, then downwards: the largest unused l in {1..d} with l <= a_i."""
    _, trailing = normalize_for_d(diagram, d)
    if trailing[-1] == 0:
        raise NotReducibleError(diagram, d)
    used = set()
    v = [0] * d
    for i in reversed(range(d)):
        choice = next((l for l in range(min(d, trailing[i]), 0, -1) if l not in used), None)
        if choice is None:
            raise NotReducibleError(diagram, d)
        v[i] = choice
        used.add(choice)
    return tuple(v)


def _check_v(v: Sequence[int], trailing: Sequence[int], d: int):
    if len(v) != d:
        raise InvalidReductionError(f"not a reduction: v needs {d} entries, got {len(v)}")
    if len(set(v)) != d:
        raise InvalidReductionError(f"not a reduction: entries of v={tuple(v)} repeat")
    for v_i, a_i in zip(v, trailing):
        if not 1 <= v_i <= d or v_i > a_i:
            raise InvalidReductionError(f"not a reduction: v={tuple(v)} does not fit {tuple(trailing)}")


def reduce(diagram: StaircaseDiagram, d: int, v: Optional[Sequence[int]] = None) -> ReductionStep:
    """Remove v_i points, largest second coordinate first, from trailing level i."""
    a, trailing = normalize_for_d(diagram, d)
    canonical = canonical_v(diagram, d) if v is None else None
    if v is None:
        v = canonical
    else:
        v = tuple(v)
        _check_v(v, trailing, d)
        try:
            canonical = canonical_v(diagram, d)
        except NotReducibleError:
            canonical = None
    try:
        after = StaircaseDiagram(tuple(range(1, a + 1)) + tuple(t - x for t, x in zip(trailing, v)))
    except DiagramError as exc:
        raise InvalidReductionError(f"not a reduction: {exc}") from exc
    removed = frozenset(
        (a + i - y, y) for i in range(d) for y in range(trailing[i] - v[i], trailing[i])
    )
    licensed = v == canonical and is_proper(diagram, d, check_divisibility=False)
    logger.debug("%d-reduction %s -> %s with v=%s", d, diagram, after, v)
    return ReductionStep(diagram, v, after, removed, d, licensed)


def chain(
    diagram: StaircaseDiagram,
    d: int,
    stop: Optional[int] = None,
    first_v: Optional[Sequence[int]] = None,
) -> ReductionChain:
    """Reduce canonically until the cardinality reaches `stop` (default one node)."""
    size = triangular(d)
    stop = size if stop is None else stop
    if stop < 0 or stop > diagram.cardinality or (diagram.cardinality - stop) % size:
        raise DiagramError(f"cannot stop a {d}-chain from {diagram} at cardinality {stop}")
    steps: List[ReductionStep] = []
    current = diagram
    v = first_v
    while current.cardinality > stop:
        try:
            step = reduce(current, d, v)
        except NotReducibleError as exc:
            raise NotReducibleError(current, d, ReductionChain(diagram, d, tuple(steps))) from exc
        steps.append(step)
        current = step.after
        v = None
    return ReductionChain(diagram, d, tuple(steps))


def degred(points: Iterable[Sequence[int]]) -> int:
    """Degree of the product of the monomials x^alpha."""
    return sum(sum(alpha) for alpha in points)


def verify_exceptional(
    removed: Iterable[MultiIndex],
    basis: Iterable[MultiIndex],
    d: int,
    budget: int = 10 ** 7,
) -> bool:
    """Brute-force check that `removed` is exceptional in `basis` for F_d.

    The one-node problem on `removed` must be generically correct and every
    other subset with the same exponent sum must fail it.
    """
    from .interp import one_point_correct

    removed = frozenset(tuple(alpha) for alpha in removed)
    basis = frozenset(tuple(alpha) for alpha in basis)
    if not removed:
        raise DiagramError("the removed set is empty")
    n = len(next(iter(removed)))
    if not removed <= basis:
        raise DiagramError("the removed set must lie inside the basis")
    if len(removed) != math.comb(n + d - 1, n):
        raise DiagramError(f"the removed set must have {math.comb(n + d - 1, n)} points")
    candidates = math.comb(len(basis), len(removed))
    if candidates > budget:
        raise InstanceTooLargeError(f"{candidates} candidate subsets exceed the budget of {budget}")
    if not one_point_correct(removed, d, n):
        return False
    target = tuple(map(sum, zip(*removed)))
    for subset in itertools.combinations(sorted(basis, key=graded_key), len(removed)):
        if tuple(map(sum, zip(*subset))) != target or frozenset(subset) == removed:
            continue
        if one_point_correct(subset, d, n):
            logger.info("subset %s shares the exponent sum and is also correct", subset)
            return False
    return True

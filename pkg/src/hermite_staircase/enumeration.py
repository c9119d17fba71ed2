"""
Exhaustive generation of d-diagrams and the base-case verification built on
it.

A base case is a pair (d, p): the problems ({F_d}_p, F) for the diagrams F
reachable from every 1-step diagram by canonical d-reductions. Checking those
finitely many problems settles every node count above p.
"""

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from .cache import VerdictCache, check
from .diagrams import (
    DiagramError,
    StaircaseDiagram,
    is_proper,
    is_safely_proper,
    largest_unsafe_cardinality,
    one_step_diagram,
    triangular,
)
from .interp import Verdict, VerdictKind, is_generically_correct, problem_for
from .reduction import ReductionStep, chain, reduce
from .reference import source_nodes_for
from .settings import RunConfig

logger = logging.getLogger(__name__)

FILTERS = ("all", "proper", "safely-proper")

"""--- Generation ---"""


def _tails(total: int, length: int, largest: int) -> Iterator[Tuple[int, ...]]:
    """Non-increasing positive sequences with the given sum, in lexicographic order."""
    if total == 0:
        yield ()
        return
    if length == 0:
        return
    for first in range(1, min(total, largest) + 1):
        for rest in _tails(total - first, length - 1, first):
            yield (first,) + rest


def enumerate_diagrams(cardinality: int, max_steps: int) -> Iterator[StaircaseDiagram]:
    """Every staircase diagram with the given cardinality and at most `max_steps` steps."""
    a = 0
    while triangular(a) <= cardinality:
        for tail in _tails(cardinality - triangular(a), max_steps, a):
            yield StaircaseDiagram.compressed(a, *tail)
        a += 1


def _normalise_filter(name: str) -> str:
    name = {"safelyProper": "safely-proper", "safely_proper": "safely-proper"}.get(name, name)
    if name not in FILTERS:
        raise ValueError(f"filter must be one of {', '.join(FILTERS)}")
    return name


def enumerate_d_diagrams(d: int, k: int, filter: str = "all") -> Iterator[StaircaseDiagram]:
    """d-diagrams for k nodes of order d, in lexicographic order of the type."""
    if d < 1 or k < 1:
        raise DiagramError("d and k must be positive")
    filter = _normalise_filter(filter)
    for diagram in enumerate_diagrams(k * triangular(d), d):
        if filter == "proper" and not is_proper(diagram, d):
            continue
        if filter == "safely-proper" and not is_safely_proper(diagram, d):
            continue
        yield diagram


def reduce_to_basecases(d: int, from_nodes: int, to_nodes: int) -> FrozenSet[StaircaseDiagram]:
    """Canonical reductions of every safely proper d-diagram from `from_nodes` down to `to_nodes`."""
    if not to_nodes < from_nodes:
        raise DiagramError("the target node count must be below the source node count")
    stop = to_nodes * triangular(d)
    terminals = set()
    for diagram in enumerate_d_diagrams(d, from_nodes, "safely-proper"):
        terminals.add(chain(diagram, d, stop).terminal)
    logger.info("d=%d: %d terminals at %d nodes from %d nodes", d, len(terminals), to_nodes, from_nodes)
    return frozenset(terminals)


def _lex(diagrams) -> List[StaircaseDiagram]:
    return sorted(diagrams, key=lambda diagram: diagram.entries)


def sound_source_nodes(d: int, k1: int) -> bool:
    """Above this node count every proper d-diagram is safely proper."""
    return (k1 + 1) * triangular(d) > largest_unsafe_cardinality(d)


def default_source_nodes(d: int, p: int) -> int:
    k1 = source_nodes_for(d)
    if k1 is None:
        k1 = 1
        while not sound_source_nodes(d, k1):
            k1 += 1
    return max(k1, p)


def basecase_list(d: int, p: int, source_nodes: Optional[int] = None) -> Iterator[StaircaseDiagram]:
    """1-step diagrams for p..k1-1 nodes reduced to p nodes, then the terminals from k1."""
    k1 = default_source_nodes(d, p) if source_nodes is None else source_nodes
    if k1 < p:
        raise DiagramError("source nodes must not be below the target node count")
    stop = p * triangular(d)
    seen = set()
    for k in range(p, max(k1, p + 1)):
        terminal = chain(one_step_diagram(k * triangular(d)), d, stop).terminal
        if terminal not in seen:
            seen.add(terminal)
            yield terminal
    terminals = reduce_to_basecases(d, k1, p) if k1 > p else enumerate_d_diagrams(d, p, "proper")
    for terminal in _lex(terminals):
        if terminal not in seen:
            seen.add(terminal)
            yield terminal


"""--- Reports ---"""


@dataclass
class Failure:
    diagram: StaircaseDiagram
    reason: str

    def __str__(self) -> str:
        return f"{self.diagram}: {self.reason}"


@dataclass
class EnumerationReport:
    d: int
    k: int
    total: int = 0
    reduced_set: Tuple[StaircaseDiagram, ...] = ()
    verdicts: Dict[StaircaseDiagram, Verdict] = field(default_factory=dict)
    failures: List[Failure] = field(default_factory=list)
    family: str = "reachable"
    step_bound: int = 0
    source_nodes: Optional[int] = None
    sound: bool = True

    @property
    def passed(self) -> bool:
        return not self.failures

    def csv_row(self) -> str:
        return f"{self.d},{self.k},{self.total},{len(self.reduced_set)},{len(self.failures)}"

    def to_json(self) -> str:
        return json.dumps(
            {
                "d": self.d,
                "k": self.k,
                "family": self.family,
                "step_bound": self.step_bound,
                "source_nodes": self.source_nodes,
                "sound": self.sound,
                "total": self.total,
                "terminals": [str(diagram) for diagram in self.reduced_set],
                "verdicts": {str(diagram): verdict.kind.value for diagram, verdict in self.verdicts.items()},
                "failures": [{"diagram": str(f.diagram), "reason": f.reason} for f in self.failures],
            },
            indent=2,
        )


CSV_HEADER = "d,k,total,terminals,failures"


"""--- Verification ---"""


def _verdict_job(args) -> Tuple[StaircaseDiagram, Verdict]:
    diagram, d, p, config = args
    return diagram, is_generically_correct(problem_for([d] * p, diagram), config)


def _verdicts(
    diagrams: Sequence[StaircaseDiagram],
    d: int,
    p: int,
    config: RunConfig,
    cache: Optional[VerdictCache],
) -> Dict[StaircaseDiagram, Verdict]:
    if config.jobs == 1 or len(diagrams) < 2:
        return {diagram: check(problem_for([d] * p, diagram), config, cache) for diagram in diagrams}
    results: Dict[StaircaseDiagram, Verdict] = {}
    pending = []
    for diagram in diagrams:
        problem = problem_for([d] * p, diagram)
        hit = cache.get(problem, config) if cache is not None else None
        if hit is None:
            pending.append(diagram)
        else:
            results[diagram] = hit
    with ProcessPoolExecutor(max_workers=config.jobs) as executor:
        for diagram, verdict in executor.map(_verdict_job, [(x, d, p, config) for x in pending]):
            results[diagram] = verdict
            if cache is not None:
                cache.put(problem_for([d] * p, diagram), config, verdict)
    return {diagram: results[diagram] for diagram in diagrams}


def verify_basecases(
    d: int,
    step_bound: int,
    p: int,
    config: Optional[RunConfig] = None,
    family: str = "reachable",
    strict: bool = True,
    source_nodes: Optional[int] = None,
    fail_fast: bool = False,
    cache: Optional[VerdictCache] = None,
) -> EnumerationReport:
    """Check both base-case conditions for every diagram of the chosen family.

    `reachable` walks the base-case list and needs step_bound == d; `proper`
    walks every diagram of cardinality p*d(d+1)/2 with at most step_bound
    steps. A verdict other than CertifiedCorrect is a failure. With
    `fail_fast` diagrams are checked one at a time and the first failure ends
    the run.
    """
    config = config or RunConfig()
    if step_bound < d:
        raise DiagramError("the step bound must be at least d")
    report = EnumerationReport(d, p, family=family, step_bound=step_bound)
    if family == "reachable":
        if step_bound != d:
            raise DiagramError("the reachable family needs step_bound == d")
        k1 = default_source_nodes(d, p) if source_nodes is None else source_nodes
        report.source_nodes = k1
        report.sound = sound_source_nodes(d, k1)
        if k1 > p:
            for source in enumerate_d_diagrams(d, k1, "proper"):
                if not is_safely_proper(source, d):
                    report.failures.append(Failure(source, f"source at {k1} nodes is not safely proper"))
                    if fail_fast:
                        return report
        candidates = basecase_list(d, p, k1)
        condition = lambda diagram: is_proper(diagram, d)
        label = "not proper"
    elif family == "proper":
        candidates = enumerate_diagrams(p * triangular(d), step_bound)
        if strict:
            condition = lambda diagram: is_safely_proper(diagram, step_bound, check_divisibility=False)
            label = f"not safely proper with respect to {step_bound}"
        else:
            condition = lambda diagram: is_proper(diagram, step_bound, check_divisibility=False)
            label = f"not proper with respect to {step_bound}"
    else:
        raise ValueError("family must be 'reachable' or 'proper'")

    diagrams: List[StaircaseDiagram] = []
    for diagram in candidates:
        diagrams.append(diagram)
        if not condition(diagram):
            report.failures.append(Failure(diagram, label))
            if fail_fast:
                break
        if fail_fast:
            verdict = check(problem_for([d] * p, diagram), config, cache)
            report.verdicts[diagram] = verdict
            if not verdict.correct:
                report.failures.append(Failure(diagram, verdict.kind.value))
                break
    if not fail_fast:
        report.verdicts = _verdicts(diagrams, d, p, config, cache)
        report.failures.extend(
            Failure(diagram, verdict.kind.value) for diagram, verdict in report.verdicts.items() if not verdict.correct
        )
    report.total = len(diagrams)
    report.reduced_set = tuple(diagrams)
    logger.info("d=%d p=%d: %d diagrams, %d failures", d, p, report.total, len(report.failures))
    return report


"""--- One-step decisions ---"""


def reduction_path(d: int, k: int) -> Tuple[StaircaseDiagram, List[ReductionStep]]:
    """Canonical reductions of the 1-step diagram for k nodes while the diagram stays proper."""
    current = one_step_diagram(k * triangular(d))
    steps = []
    while current.cardinality > triangular(d) and is_proper(current, d, check_divisibility=False):
        step = reduce(current, d)
        steps.append(step)
        current = step.after
    return current, steps


def decide_one_step(
    d: int,
    k: int,
    config: Optional[RunConfig] = None,
    cache: Optional[VerdictCache] = None,
) -> Verdict:
    """Is ({F_d}_k, 1-step diagram) generically correct?

    Licensed reductions shrink the problem first; when the smaller problem is
    not certified the original one is checked directly.
    """
    if d < 1 or k < 1:
        raise DiagramError("d and k must be positive")
    config = config or RunConfig()
    terminal, steps = reduction_path(d, k)
    if steps:
        nodes = terminal.cardinality // triangular(d)
        verdict = check(problem_for([d] * nodes, terminal), config, cache)
        if verdict.correct:
            logger.debug("d=%d k=%d certified through %s", d, k, terminal)
            return Verdict(
                VerdictKind.CERTIFIED_CORRECT,
                verdict.trials,
                verdict.prime,
                verdict.degree_bound,
                method=f"reduction to {terminal}",
                witness=verdict.witness,
            )
    return check(problem_for([d] * k, one_step_diagram(k * triangular(d))), config, cache)


def count_row(d: int, k1: int, k2: Optional[int] = None) -> Dict[str, Optional[int]]:
    """One row of the counts table."""
    row: Dict[str, Optional[int]] = {
        "d": d,
        "k1": k1,
        "proper_k1": sum(1 for _ in enumerate_d_diagrams(d, k1, "proper")),
        "k2": k2,
        "proper_k2": None,
        "terminals": None,
        "basecases": None,
    }
    if k2 is not None:
        row["proper_k2"] = sum(1 for _ in enumerate_d_diagrams(d, k2, "proper"))
        row["terminals"] = len(reduce_to_basecases(d, k1, k2))
        row["basecases"] = sum(1 for _ in basecase_list(d, k2, k1))
    return row

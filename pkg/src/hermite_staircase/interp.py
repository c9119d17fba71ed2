"""
Hermite interpolation problems and their generic-correctness verdicts.

A problem pairs a sequence of Ferrers diagrams (derivative conditions, one
diagram per node) with a set of monomial exponents. It is generically correct
when det M, as a polynomial in the node coordinates, is not identically zero.
A nonzero evaluation modulo a prime proves that; zero evaluations are only
evidence, unless the exact grid evaluation settles the question.
"""

import hashlib
import itertools
import logging
import math
import random
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import sympy

from .diagrams import (
    FerrersDiagram,
    HermiteError,
    MultiIndex,
    StaircaseDiagram,
    degree_monomials,
    full_triangle,
    graded_key,
    is_below,
    monomials_below_degree,
)
from .linalg import det_bareiss, det_mod, rank_exact, rank_mod
from .reduction import degred
from .settings import RunConfig

logger = logging.getLogger(__name__)

FieldElement = Union[int, sympy.Rational]
Point = Tuple[int, ...]

"""--- Errors ---"""


class InterpError(HermiteError, ValueError):
    """An interpolation problem is malformed."""


class PrimeTooSmallError(InterpError):
    """The prime does not exceed the degree bound of the determinant."""


"""--- Problems and verdicts ---"""


@dataclass(frozen=True)
class InterpProblem:
    conditions: Tuple[FerrersDiagram, ...]
    basis: Tuple[MultiIndex, ...]
    dimension: int = 2

    def __post_init__(self):
        basis = tuple(sorted(set(tuple(alpha) for alpha in self.basis), key=graded_key))
        if len(basis) != len(self.basis):
            raise InterpError("basis exponents repeat")
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "conditions", tuple(self.conditions))
        for diagram in self.conditions:
            if diagram.dimension != self.dimension:
                raise InterpError("condition diagrams must match the problem dimension")
        if any(len(alpha) != self.dimension for alpha in basis):
            raise InterpError("basis exponents must match the problem dimension")
        if self.size != len(basis):
            raise InterpError(f"{self.size} conditions against {len(basis)} basis monomials")

    @classmethod
    def of(cls, conditions: Sequence[FerrersDiagram], basis: Iterable[Sequence[int]]) -> "InterpProblem":
        dimension = conditions[0].dimension if conditions else 2
        return cls(tuple(conditions), tuple(tuple(alpha) for alpha in basis), dimension)

    @property
    def size(self) -> int:
        return sum(diagram.cardinality for diagram in self.conditions)

    @property
    def degree_bound(self) -> int:
        return degred(self.basis)

    @property
    def variables(self) -> int:
        return self.dimension * len(self.conditions)

    def condition_set(self) -> List[Tuple[int, MultiIndex]]:
        """Pairs (node index, beta) in row order."""
        return [(i, beta) for i, diagram in enumerate(self.conditions) for beta in diagram.graded()]

    def key(self) -> str:
        text = "n={};F={};B={}".format(
            self.dimension,
            "|".join(",".join(map(str, d.graded())) for d in self.conditions),
            ",".join(map(str, self.basis)),
        )
        return hashlib.sha256(text.encode()).hexdigest()


def problem_for(orders: Sequence[int], basis: Union[StaircaseDiagram, Iterable[MultiIndex]]) -> InterpProblem:
    """Nodes carrying full triangles F_d, one order per node."""
    points = basis.points if isinstance(basis, StaircaseDiagram) else basis
    return InterpProblem.of([full_triangle(d) for d in orders], points)


class VerdictKind(str, Enum):
    CERTIFIED_CORRECT = "CertifiedCorrect"
    CERTIFIED_INCORRECT = "CertifiedIncorrect"
    PROBABLY_INCORRECT = "ProbablyIncorrect"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    trials: int
    prime: Optional[int]
    degree_bound: int
    error_bound: sympy.Rational = sympy.Rational(0)
    method: str = "modular"
    witness: Optional[Tuple[Point, ...]] = None

    @property
    def correct(self) -> bool:
        return self.kind is VerdictKind.CERTIFIED_CORRECT

    @property
    def exit_code(self) -> int:
        return {
            VerdictKind.CERTIFIED_CORRECT: 0,
            VerdictKind.CERTIFIED_INCORRECT: 2,
            VerdictKind.PROBABLY_INCORRECT: 3,
        }[self.kind]

    def to_record(self) -> Dict:
        return {
            "kind": self.kind.value,
            "trials": self.trials,
            "prime": self.prime,
            "degree_bound": self.degree_bound,
            "error_bound": str(self.error_bound),
            "method": self.method,
            "witness": [list(point) for point in self.witness] if self.witness is not None else None,
        }

    @classmethod
    def from_record(cls, record: Dict) -> "Verdict":
        witness = record.get("witness")
        return cls(
            kind=VerdictKind(record["kind"]),
            trials=int(record["trials"]),
            prime=record.get("prime"),
            degree_bound=int(record["degree_bound"]),
            error_bound=sympy.Rational(record.get("error_bound", "0")),
            method=record.get("method", "modular"),
            witness=tuple(tuple(point) for point in witness) if witness is not None else None,
        )


"""--- The interpolation matrix ---"""


def phi(alpha: Sequence[int], beta: Sequence[int], point: Sequence[FieldElement], p: Optional[int] = None) -> FieldElement:
    """The beta-th derivative of x^alpha at `point`, unnormalised."""
    if not len(alpha) == len(beta) == len(point):
        raise InterpError("alpha, beta and the point must share a dimension")
    if not is_below(beta, alpha):
        return 0
    value = 1
    for a, b, x in zip(alpha, beta, point):
        value *= math.perm(a, b) * (pow(x, a - b, p) if p else x ** (a - b))
        if p:
            value %= p
    return value


def _matrix(problem: InterpProblem, points: Sequence[Point], p: Optional[int] = None) -> List[List[FieldElement]]:
    return [
        [phi(alpha, beta, points[i], p) for alpha in problem.basis]
        for i, beta in problem.condition_set()
    ]


def build_matrix(problem: InterpProblem, points: Sequence[Sequence[FieldElement]], p: Optional[int] = None) -> List[List[FieldElement]]:
    """Rows follow (node, beta in graded order); columns the basis in graded order."""
    points = [tuple(point) for point in points]
    if len(points) != len(problem.conditions):
        raise InterpError(f"{len(problem.conditions)} nodes needed, got {len(points)}")
    if any(len(point) != problem.dimension for point in points):
        raise InterpError("node coordinates must match the problem dimension")
    if len(set(points)) != len(points):
        raise InterpError("nodes must be pairwise distinct")
    return _matrix(problem, points, p)


def sample_points(problem: InterpProblem, seed: int, trial: int, p: int) -> Tuple[Point, ...]:
    rng = random.Random(f"{seed}:{trial}")
    return tuple(
        tuple(rng.randrange(p) for _ in range(problem.dimension)) for _ in problem.conditions
    )


"""--- Verdicts ---"""


def _grid_witness(problem: InterpProblem) -> Optional[Tuple[Point, ...]]:
    """First grid point where det M is nonzero, or None when it vanishes on the whole grid."""
    n = problem.dimension
    axis = range(problem.degree_bound + 1)
    for coordinates in itertools.product(axis, repeat=problem.variables):
        points = tuple(coordinates[i:i + n] for i in range(0, len(coordinates), n))
        if det_bareiss(_matrix(problem, points)):
            return points
    return None


def _exact_allowed(problem: InterpProblem, config: RunConfig) -> bool:
    return (
        problem.size <= config.exact_threshold
        and problem.variables <= config.exact_variables
        and (problem.degree_bound + 1) ** problem.variables <= config.budget
    )


def is_generically_correct(problem: InterpProblem, config: Optional[RunConfig] = None) -> Verdict:
    config = config or RunConfig()
    p = config.prime
    bound = problem.degree_bound
    if p <= bound:
        raise PrimeTooSmallError(f"prime {p} does not exceed the degree bound {bound}")
    for trial in range(config.trials):
        points = sample_points(problem, config.seed, trial, p)
        if det_mod(_matrix(problem, points, p), p):
            return Verdict(VerdictKind.CERTIFIED_CORRECT, trial + 1, p, bound, witness=points)
        logger.debug("trial %d: determinant vanishes modulo %d", trial, p)
    if _exact_allowed(problem, config):
        witness = _grid_witness(problem)
        if witness is None:
            return Verdict(VerdictKind.CERTIFIED_INCORRECT, config.trials, p, bound, method="exact-grid")
        return Verdict(VerdictKind.CERTIFIED_CORRECT, config.trials, None, bound, method="exact-grid", witness=witness)
    return Verdict(
        VerdictKind.PROBABLY_INCORRECT, config.trials, p, bound, error_bound=sympy.Rational(bound, p) ** config.trials
    )


def one_point_correct(exponents: Iterable[Sequence[int]], d: int, n: int = 2) -> bool:
    """Whether the exponent points avoid every hypersurface of degree d - 1."""
    exponents = [tuple(alpha) for alpha in exponents]
    needed = math.comb(n + d - 1, n)
    if len(exponents) != needed or len(set(exponents)) != needed:
        raise InterpError(f"{needed} distinct exponents needed for d={d}, n={n}")
    monomials = monomials_below_degree(d, n)
    rows = [[math.prod(x ** m for x, m in zip(alpha, mono)) for mono in monomials] for alpha in exponents]
    if rank_mod(rows, 2 ** 61 - 1) == needed:
        return True
    return rank_exact(rows) == needed


@dataclass(frozen=True)
class GenericBasis:
    basis: Tuple[MultiIndex, ...]
    verdict: Verdict


def generic_basis(conditions: Sequence[FerrersDiagram], config: Optional[RunConfig] = None) -> GenericBasis:
    """Greedy graded completion: keep a monomial iff it raises the rank at random nodes."""
    config = config or RunConfig()
    p = config.prime
    dimension = conditions[0].dimension if conditions else 2
    rng = random.Random(f"{config.seed}:0")
    points = tuple(tuple(rng.randrange(p) for _ in range(dimension)) for _ in conditions)
    rows = [(i, beta) for i, diagram in enumerate(conditions) for beta in diagram.graded()]
    size = len(rows)
    pivots: Dict[int, List[int]] = {}
    kept: List[MultiIndex] = []
    for alpha in degree_monomials(dimension):
        if len(kept) == size:
            break
        if sum(alpha) > size:
            raise InterpError("no basis found; nodes are not in general position")
        column = [phi(alpha, beta, points[i], p) for i, beta in rows]
        for row, pivot in pivots.items():
            if column[row]:
                factor = column[row] * pow(pivot[row], -1, p) % p
                column = [(x - factor * y) % p for x, y in zip(column, pivot)]
        lead = next((r for r, x in enumerate(column) if x), None)
        if lead is not None:
            pivots[lead] = column
            kept.append(alpha)
    problem = InterpProblem(tuple(conditions), tuple(kept), dimension)
    verdict = Verdict(VerdictKind.CERTIFIED_CORRECT, 1, p, problem.degree_bound, method="greedy", witness=points)
    return GenericBasis(problem.basis, verdict)

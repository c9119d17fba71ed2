"""
Ferrers diagrams in N^n and staircase diagrams in N^2.

A staircase diagram is stored by its type (a_1, ..., a_k): level i holds the
points alpha with |alpha| = i - 1 and alpha_2 < a_i. The compressed text form
(~a, a_1, ..., a_m) abbreviates the full prefix (1, 2, ..., a).

Author: avery
"""

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import FrozenSet, Iterable, Iterator, List, Sequence, Tuple

logger = logging.getLogger(__name__)

MultiIndex = Tuple[int, ...]

"""--- Errors ---"""


class HermiteError(Exception):
    """Base class for every error raised by hermite_staircase."""


class DiagramError(HermiteError, ValueError):
    """A type or point set does not describe the requested kind of diagram."""


class TypeParseError(DiagramError):
    """Type text could not be parsed."""

    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position


"""--- Multi-indices ---"""


def graded_key(alpha: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    """Sort key of the fixed graded order: total degree, then reversed exponents.

    On the plane this orders each degree by ascending second coordinate.
    """
    return sum(alpha), tuple(reversed(alpha))


def is_below(beta: Sequence[int], alpha: Sequence[int]) -> bool:
    """beta <= alpha componentwise."""
    return all(b <= a for a, b in zip(alpha, beta))


def _indices_of_degree(total: int, n: int) -> Iterator[MultiIndex]:
    if n == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _indices_of_degree(total - first, n - 1):
            yield (first,) + rest


def monomials_below_degree(d: int, n: int) -> List[MultiIndex]:
    """All alpha in N^n with |alpha| < d, in graded order."""
    points = [alpha for s in range(d) for alpha in _indices_of_degree(s, n)]
    return sorted(points, key=graded_key)


def degree_monomials(n: int) -> Iterator[MultiIndex]:
    """Every multi-index of N^n, degree by degree, in graded order."""
    for s in itertools.count():
        yield from sorted(_indices_of_degree(s, n), key=graded_key)


"""--- Ferrers diagrams ---"""


@dataclass(frozen=True)
class FerrersDiagram:
    """A finite downward-closed subset of N^n."""

    points: FrozenSet[MultiIndex]
    dimension: int = 2

    def __post_init__(self):
        if self.dimension < 1:
            raise DiagramError("dimension must be at least 1")
        for alpha in self.points:
            if len(alpha) != self.dimension or min(alpha) < 0:
                raise DiagramError(f"{alpha} is not a multi-index of N^{self.dimension}")
            for i, a in enumerate(alpha):
                if a and alpha[:i] + (a - 1,) + alpha[i + 1:] not in self.points:
                    raise DiagramError(f"point set is not downward closed below {alpha}")

    @classmethod
    def of(cls, points: Iterable[Sequence[int]], dimension: int = 2) -> "FerrersDiagram":
        return cls(frozenset(tuple(p) for p in points), dimension)

    @property
    def cardinality(self) -> int:
        return len(self.points)

    def graded(self) -> List[MultiIndex]:
        return sorted(self.points, key=graded_key)

    def __len__(self) -> int:
        return len(self.points)


def full_triangle(d: int, n: int = 2) -> FerrersDiagram:
    """F_d^n = { alpha in N^n : |alpha| < d }."""
    if d < 1 or n < 1:
        raise DiagramError("full_triangle needs d >= 1 and n >= 1")
    return FerrersDiagram(frozenset(monomials_below_degree(d, n)), n)


def triangle_order(diagram: FerrersDiagram) -> int:
    """Return d when the diagram is F_d on the plane."""
    if diagram.dimension != 2 or not diagram.points:
        raise DiagramError("only non-empty planar diagrams can be full triangles")
    d = max(sum(alpha) for alpha in diagram.points) + 1
    if diagram.cardinality != d * (d + 1) // 2:
        raise DiagramError("diagram is not a full triangle")
    return d


"""--- Staircase diagrams ---"""


def _strip(entries: Sequence[int]) -> Tuple[int, ...]:
    entries = list(entries)
    while entries and entries[-1] == 0:
        entries.pop()
    return tuple(entries)


def _full_prefix(entries: Sequence[int]) -> int:
    a = 0
    while a < len(entries) and entries[a] == a + 1:
        a += 1
    return a


def validate_type(entries: Sequence[int]) -> Tuple[int, ...]:
    """Check a_i <= i and downward closure; return the stripped type."""
    for i, a_i in enumerate(entries, start=1):
        if a_i < 0 or a_i > i:
            raise DiagramError(f"not a diagram type: entry {a_i} at level {i} (need 0 <= a_i <= i)")
    stripped = _strip(entries)
    a = _full_prefix(stripped)
    tail = stripped[a:]
    if any(x < y for x, y in zip(tail, tail[1:])):
        raise DiagramError(f"not a diagram type: {tuple(entries)} is not downward closed")
    return stripped


@dataclass(frozen=True)
class StaircaseDiagram:
    """A planar Ferrers diagram given by its fully expanded type."""

    entries: Tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "entries", validate_type(self.entries))

    @classmethod
    def parse(cls, text: str) -> "StaircaseDiagram":
        return cls(parse_type(text))

    @classmethod
    def compressed(cls, a: int, *tail: int) -> "StaircaseDiagram":
        return cls(tuple(range(1, a + 1)) + tuple(tail))

    @property
    def cardinality(self) -> int:
        return sum(self.entries)

    @property
    def prefix(self) -> int:
        """Height a of the maximal full prefix (1, ..., a)."""
        return _full_prefix(self.entries)

    @property
    def step_profile(self) -> Tuple[int, ...]:
        """Entries after the maximal full prefix."""
        return self.entries[self.prefix:]

    @property
    def steps(self) -> int:
        return len(self.step_profile)

    @cached_property
    def points(self) -> FrozenSet[MultiIndex]:
        return frozenset(
            (level - y, y) for level, a_i in enumerate(self.entries) for y in range(a_i)
        )

    def to_ferrers(self) -> FerrersDiagram:
        return FerrersDiagram(self.points, 2)

    def expanded_text(self) -> str:
        return "(" + ",".join(str(x) for x in self.entries or (0,)) + ")"

    def __str__(self) -> str:
        parts = [f"~{self.prefix}"] + [str(x) for x in self.step_profile]
        return "(" + ",".join(parts) + ")"


def parse_type(text: str) -> Tuple[int, ...]:
    """Parse `(~a,a1,...)` or `(a1,...,ak)` into an expanded type."""
    open_at = text.find("(")
    close_at = text.rfind(")")
    if open_at < 0 or text[:open_at].strip():
        raise TypeParseError("expected '('", text, 0)
    if close_at < open_at or text[close_at + 1:].strip():
        raise TypeParseError("expected ')'", text, len(text))
    entries: List[int] = []
    position = open_at + 1
    for index, chunk in enumerate(text[open_at + 1:close_at].split(",")):
        token = chunk.strip()
        where = position + len(chunk) - len(chunk.lstrip())
        if index == 0 and token.startswith("~") and token[1:].strip().isdigit():
            entries.extend(range(1, int(token[1:]) + 1))
        elif token.isdigit():
            entries.append(int(token))
        else:
            raise TypeParseError(f"unexpected token {token!r}", text, where)
        position += len(chunk) + 1
    return validate_type(entries)


def from_type(entries: Sequence[int]) -> StaircaseDiagram:
    return StaircaseDiagram(tuple(entries))


def one_step_diagram(cardinality: int) -> StaircaseDiagram:
    """The diagram (~a, r) with a(a+1)/2 + r = cardinality and 0 <= r <= a."""
    if cardinality < 0:
        raise DiagramError("cardinality must be non-negative")
    a = 0
    while (a + 1) * (a + 2) // 2 <= cardinality:
        a += 1
    rest = cardinality - a * (a + 1) // 2
    return StaircaseDiagram.compressed(a, *([rest] if rest else []))


"""--- d-diagram predicates ---"""


def triangular(d: int) -> int:
    return d * (d + 1) // 2


def normalize_for_d(diagram: StaircaseDiagram, d: int) -> Tuple[int, Tuple[int, ...]]:
    """Split the type as (~a, a_1, ..., a_d) with exactly d trailing entries.

    Trailing entries may borrow from the full prefix, e.g. (~5,3) with d=3
    becomes a=3 with trailing (4,5,3).
    """
    if d < 1:
        raise DiagramError("d must be positive")
    entries = diagram.entries
    if len(entries) <= d:
        return 0, entries + (0,) * (d - len(entries))
    a = len(entries) - d
    if _full_prefix(entries) < a:
        raise DiagramError(f"{diagram} has more than {d} steps")
    return a, entries[a:]


def is_d_diagram(diagram: StaircaseDiagram, d: int) -> bool:
    return diagram.cardinality % triangular(d) == 0 and diagram.steps <= d


def _proper_split(a: int, trailing: Sequence[int], d: int) -> bool:
    if a < d:
        return False
    return all(not (x == y and x < d) for x, y in zip(trailing, trailing[1:]))


def is_proper(diagram: StaircaseDiagram, d: int, check_divisibility: bool = True) -> bool:
    """a >= d and equal neighbours among the trailing entries are at least d."""
    if check_divisibility:
        if not is_d_diagram(diagram, d):
            raise DiagramError(f"{diagram} is not a {d}-diagram")
    elif diagram.steps > d:
        return False
    a, trailing = normalize_for_d(diagram, d)
    return _proper_split(a, trailing, d)


def is_safely_proper(diagram: StaircaseDiagram, d: int, check_divisibility: bool = True) -> bool:
    if not is_proper(diagram, d, check_divisibility):
        return False
    a, trailing = normalize_for_d(diagram, d)
    return a >= 2 * d and trailing[-1] > 0


def largest_unsafe_cardinality(d: int) -> int:
    """Upper bound on the size of a proper d-diagram that is not safely proper.

    Such a diagram has a < 2d, so it fits inside the triangle with 3d - 1 levels.
    """
    return triangular(3 * d - 1)


"""--- Diagrams of a sequence of triangles ---"""


def f_s_from_orders(orders: Sequence[int]) -> StaircaseDiagram:
    """Level beta of F_S has width sum(max(0, d_i - beta))."""
    if not orders or min(orders) < 1:
        raise DiagramError("F_S needs at least one triangle of positive order")
    widths = [sum(max(0, d - beta) for d in orders) for beta in range(max(orders))]
    points = {(x, beta) for beta, width in enumerate(widths) for x in range(width)}
    top = max(x + y for x, y in points)
    entries = [sum(1 for x, y in points if x + y == level) for level in range(top + 1)]
    diagram = StaircaseDiagram(tuple(entries))
    if diagram.points != frozenset(points):
        raise DiagramError("F_S is not a staircase diagram")
    logger.debug("F_S for orders %s has type %s", orders, diagram)
    return diagram


def f_s(triangles: Sequence[FerrersDiagram]) -> StaircaseDiagram:
    return f_s_from_orders([triangle_order(t) for t in triangles])

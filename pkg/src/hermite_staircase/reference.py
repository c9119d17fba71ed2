"""
Published reference tables, shipped as package data.
"""

from functools import lru_cache
from importlib import resources
from typing import Dict, List, Optional, Set, Tuple

TABLES_FILE = "reference_tables.txt"

Row = List[Optional[int]]


def parse_tables(text: str) -> Dict[str, List[Row]]:
    tables: Dict[str, List[Row]] = {}
    current: Optional[List[Row]] = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = tables.setdefault(line[1:-1], [])
            continue
        if current is None:
            raise ValueError(f"line {number}: row outside of a table")
        current.append([None if cell == "-" else int(cell) for cell in line.split()])
    return tables


@lru_cache(maxsize=None)
def load_tables() -> Dict[str, List[Row]]:
    text = resources.files(__package__).joinpath(TABLES_FILE).read_text()
    return parse_tables(text)


def exact_r() -> List[List[int]]:
    return [list(row) for row in load_tables()["rmk"]]


def r_bounds_table() -> List[List[int]]:
    return [list(row) for row in load_tables()["rmk-bounds"]]


def exceptional_triples() -> Set[Tuple[int, int, int]]:
    return {tuple(row) for row in load_tables()["triples"]}


def source_nodes_for(d: int) -> Optional[int]:
    for row in load_tables()["source-nodes"]:
        if row[0] == d:
            return row[1]
    return None


def published_counts() -> Dict[int, Row]:
    return {row[0]: row for row in load_tables()["counts"]}


def bound_violations() -> List[Tuple[str, int, int, int, int]]:
    """Cells (table, m, k, bound, exact) where a bound falls below the exact value."""
    from .bounds import r_bound

    violations = []
    sharper = r_bounds_table()
    for m, row in enumerate(exact_r()):
        for k, exact in enumerate(row):
            if r_bound(m, k) < exact:
                violations.append(("r-bound", m, k, r_bound(m, k), exact))
            if sharper[m][k] < exact:
                violations.append(("rmk-bounds", m, k, sharper[m][k], exact))
    return violations

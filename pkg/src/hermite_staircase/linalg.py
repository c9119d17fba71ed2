"""
Determinants and ranks over a prime field and over the rationals.

Matrices are plain lists of rows. Prime-field entries are python ints taken
modulo p; exact entries are ints or sympy rationals.
"""

from typing import List, Sequence

import sympy

Matrix = List[List[int]]


def _square(matrix: Sequence[Sequence]) -> int:
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix must be square")
    return n


def det_mod(matrix: Sequence[Sequence[int]], p: int) -> int:
    """Determinant modulo p by Gaussian elimination."""
    n = _square(matrix)
    rows = [[x % p for x in row] for row in matrix]
    det = 1
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col]), None)
        if pivot is None:
            return 0
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        lead = rows[col][col]
        det = det * lead % p
        inv = pow(lead, -1, p)
        for r in range(col + 1, n):
            factor = rows[r][col] * inv % p
            if factor:
                rows[r] = [(x - factor * y) % p for x, y in zip(rows[r], rows[col])]
    return det % p


def rank_mod(matrix: Sequence[Sequence[int]], p: int) -> int:
    """Rank modulo p of a possibly rectangular matrix."""
    rows = [[x % p for x in row] for row in matrix]
    if not rows:
        return 0
    width = len(rows[0])
    rank = 0
    for col in range(width):
        if rank == len(rows):
            break
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        for r in range(rank + 1, len(rows)):
            factor = rows[r][col] * inv % p
            if factor:
                rows[r] = [(x - factor * y) % p for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def det_bareiss(matrix: Sequence[Sequence[int]]) -> int:
    """Fraction-free determinant of an integer matrix."""
    n = _square(matrix)
    if n == 0:
        return 1
    rows = [list(row) for row in matrix]
    sign = 1
    previous = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if rows[r][k]), None)
            if swap is None:
                return 0
            rows[k], rows[swap] = rows[swap], rows[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                rows[i][j] = (rows[i][j] * rows[k][k] - rows[i][k] * rows[k][j]) // previous
            rows[i][k] = 0
        previous = rows[k][k]
    return sign * rows[n - 1][n - 1]


def det_exact(matrix: Sequence[Sequence]) -> sympy.Rational:
    """Exact determinant over the rationals."""
    n = _square(matrix)
    if n == 0:
        return sympy.Integer(1)
    return sympy.Rational(sympy.Matrix(matrix).det(method="bareiss"))


def rank_exact(matrix: Sequence[Sequence]) -> int:
    if not matrix or not matrix[0]:
        return 0
    return sympy.Matrix(matrix).rank()

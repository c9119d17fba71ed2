"""
Unit tests for the field arithmetic.

Core claims:
    - det_mod agrees with the exact integer determinant reduced modulo p
    - det_bareiss and det_exact agree on integer matrices
    - Rational matrices reduced modulo p keep their determinant modulo p
    - Repeated rows give zero and the identity gives one, over any field
    - rank_mod and rank_exact handle rectangular matrices
"""

import random

import pytest
from sympy import Rational

from hermite_staircase.linalg import det_bareiss, det_exact, det_mod, rank_exact, rank_mod

PRIMES = [101, 2 ** 31 - 1, 2 ** 61 - 1]


# -- Helpers -----------------------------------------------------------------

def _random_matrix(rng, n, low=-20, high=20):
    return [[rng.randint(low, high) for _ in range(n)] for _ in range(n)]


def _residue(x, p):
    return int(x.p) * pow(int(x.q), -1, p) % p


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


# == 1. Determinants ========================================================

class TestDeterminants:
    @pytest.mark.parametrize("p", PRIMES)
    def test_modular_matches_exact(self, p):
        rng = random.Random(p)
        for n in range(1, 7):
            for _ in range(5):
                matrix = _random_matrix(rng, n)
                assert det_mod(matrix, p) == det_bareiss(matrix) % p

    def test_rational_matrices(self):
        rng = random.Random(8)
        p = 2 ** 61 - 1
        for _ in range(100):
            matrix = [[Rational(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(8)] for _ in range(8)]
            exact = det_exact(matrix)
            assert det_mod([[_residue(x, p) for x in row] for row in matrix], p) == _residue(exact, p)

    def test_bareiss_matches_sympy(self):
        rng = random.Random(7)
        for n in range(1, 6):
            matrix = _random_matrix(rng, n)
            assert det_exact(matrix) == det_bareiss(matrix)

    def test_zero_pivot_needs_a_swap(self):
        matrix = [[0, 1], [1, 0]]
        assert det_bareiss(matrix) == -1
        assert det_mod(matrix, 101) == 100

    @pytest.mark.parametrize("p", PRIMES)
    def test_repeated_row(self, p):
        matrix = [[1, 2, 3], [4, 5, 6], [1, 2, 3]]
        assert det_mod(matrix, p) == 0
        assert det_bareiss(matrix) == 0

    @pytest.mark.parametrize("p", PRIMES)
    def test_identity(self, p):
        assert det_mod(_identity(5), p) == 1
        assert det_bareiss(_identity(5)) == 1
        assert det_exact(_identity(5)) == 1

    def test_empty_matrix(self):
        assert det_bareiss([]) == 1
        assert det_exact([]) == 1

    def test_rational_entries(self):
        assert det_exact([[Rational(1, 2), 0], [0, 4]]) == 2

    def test_not_square(self):
        with pytest.raises(ValueError):
            det_mod([[1, 2]], 101)


# == 2. Ranks ===============================================================

class TestRanks:
    def test_rectangular(self):
        rows = [[1, 2, 3], [2, 4, 6]]
        assert rank_mod(rows, 101) == 1
        assert rank_exact(rows) == 1

    def test_full_rank(self):
        rows = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]]
        assert rank_mod(rows, 2 ** 61 - 1) == 3
        assert rank_exact(rows) == 3

    def test_rank_drops_modulo_small_prime(self):
        rows = [[1, 1], [1, 6]]
        assert rank_mod(rows, 5) == 1
        assert rank_exact(rows) == 2

    def test_empty(self):
        assert rank_mod([], 101) == 0
        assert rank_exact([]) == 0

"""Shared helpers and independent oracles.

The oracles here deliberately avoid the package's kernels: determinants use
the Leibniz permutation expansion and sequences enumerate index sets with
itertools instead of bit tricks.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations, permutations

import pytest
from hypothesis import settings, strategies as st

from aprseq.exactfield import QQ, FieldSpec
from aprseq.symmatrix import SymMatrix

settings.register_profile("aprseq", deadline=None)
settings.load_profile("aprseq")


def leibniz_det(grid, p=None):
    n = len(grid)
    total = 0
    for perm in permutations(range(n)):
        inv = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        term = Fraction(1)
        for i in range(n):
            term *= grid[i][perm[i]]
        total += -term if inv % 2 else term
    if p is not None:
        return Fraction(total) % p if Fraction(total).denominator == 1 else None
    return Fraction(total)


def oracle_minor(B: SymMatrix, rows, cols):
    """rows/cols are 1-based; value as Fraction (rationals) or residue (GF(p))."""
    grid = [[B.rows[i - 1][j - 1] for j in cols] for i in rows]
    if B.field.is_rational:
        return leibniz_det(grid)
    return int(leibniz_det(grid)) % B.field.modulus


def _letter(values):
    nz = [v != 0 for v in values]
    if all(nz):
        return "A"
    if not any(nz):
        return "N"
    return "S"


def oracle_apr(B: SymMatrix) -> str:
    n = B.n
    idx = range(1, n + 1)
    out = []
    for k in range(1, n):
        vals = []
        for alpha in combinations(idx, k - 1):
            rest = [x for x in idx if x not in alpha]
            for i in rest:
                for j in rest:
                    if i != j:
                        vals.append(oracle_minor(B, sorted(alpha + (i,)), sorted(alpha + (j,))))
        out.append(_letter(vals))
    return "".join(out)


def oracle_epr(B: SymMatrix) -> str:
    idx = range(1, B.n + 1)
    return "".join(_letter([oracle_minor(B, g, g) for g in combinations(idx, k)]) for k in range(1, B.n + 1))


def oracle_qpr(B: SymMatrix) -> str:
    n = B.n
    idx = range(1, n + 1)
    out = []
    for k in range(1, n + 1):
        vals = []
        for R in combinations(idx, k):
            for C in combinations(idx, k):
                if len(set(R) & set(C)) >= k - 1:
                    vals.append(oracle_minor(B, R, C))
        out.append(_letter(vals))
    return "".join(out)


def oracle_rank(B: SymMatrix) -> int:
    n = B.n
    for k in range(n, 0, -1):
        for R in combinations(range(1, n + 1), k):
            for C in combinations(range(1, n + 1), k):
                if oracle_minor(B, R, C) != 0:
                    return k
    return 0


def random_int_matrix(rng: random.Random, n: int, lo: int = -3, hi: int = 3, field: FieldSpec = QQ) -> SymMatrix:
    g = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            g[i][j] = g[j][i] = rng.randint(lo, hi)
    return SymMatrix(g, field)


@st.composite
def sym_matrices(draw, min_n=1, max_n=5, values=st.integers(-3, 3)):
    n = draw(st.integers(min_n, max_n))
    g = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            g[i][j] = g[j][i] = draw(values)
    return SymMatrix(g)


sparse_values = st.sampled_from([0, 0, 0, 1, -1, 2])
rational_values = st.fractions(min_value=-4, max_value=4, max_denominator=3)


@pytest.fixture
def rng():
    return random.Random(12345)

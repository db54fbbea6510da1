"""Small exact linear-algebra helpers over ``fractions.Fraction``.

Everything here works on lists/tuples of Fractions and is only meant for
the tiny matrices this package deals with (n <= 12 or so).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Row = Sequence[Fraction]
Matrix = Sequence[Row]


def identity(n: int) -> list[list[Fraction]]:
    return [[Fraction(i == j) for j in range(n)] for i in range(n)]


def vec_mat(v: Sequence[Fraction], m: Matrix) -> list[Fraction]:
    n = len(m)
    return [sum((v[i] * m[i][j] for i in range(n)), Fraction(0)) for j in range(len(m[0]))]


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b, strict=True)), Fraction(0))


def determinant(m: Matrix) -> Fraction:
    """Exact determinant by Gaussian elimination with row swaps."""
    n = len(m)
    a = [list(row) for row in m]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            if a[r][col] != 0:
                factor = a[r][col] * inv
                for c in range(col, n):
                    a[r][c] -= factor * a[col][c]
    return det


def solve(m: Matrix, rhs: Sequence[Fraction]) -> list[Fraction]:
    """Solve m x = rhs exactly (Gauss-Jordan). Raises ValueError if singular."""
    n = len(m)
    a = [list(row) + [rhs[i]] for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise ValueError("singular system")
        a[col], a[pivot] = a[pivot], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]

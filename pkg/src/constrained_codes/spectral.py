"""Spectral test generalizing the Kraft inequality to constrained sources.

The substitution matrix puts weight ``2^-l_i`` on every allowed transition
out of symbol i.  A uniquely decodable code must keep its spectral radius
at or below 1; on fully connected graphs this reduces to the classic Kraft
sum.  The boundary case (radius exactly 1) is decided exactly with rational
arithmetic because floating point cannot classify it.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import exact
from .errors import NonConvergence, NotIrreducible
from .model import LengthVector, TransitionGraph

EXACT_MINOR_LIMIT = 12
POWER_ITERATION_CAP = 100_000
_SHIFT = 0.5


@dataclass(frozen=True)
class SubstitutionMatrix:
    """Nonnegative matrix with ``2^-l_i`` at allowed transitions, 0 elsewhere.

    ``row_weights`` is the vector ``[2^-l_1, ..., 2^-l_n]`` (each row's
    constant nonzero value).
    """

    rows: tuple[tuple[Fraction, ...], ...]
    row_weights: tuple[Fraction, ...]

    @property
    def n(self) -> int:
        return len(self.rows)


class KraftClassification(Enum):
    STRICTLY_BELOW_ONE = "strictly_below_one"
    EXACTLY_ONE = "exactly_one"
    ABOVE_ONE = "above_one"


@dataclass(frozen=True)
class KraftVerdict:
    classification: KraftClassification
    radius_estimate: float
    exact: bool


def substitution_matrix(graph: TransitionGraph, lengths: LengthVector) -> SubstitutionMatrix:
    if len(lengths) != graph.n:
        raise ValueError("length vector does not match graph size")
    weights = tuple(Fraction(1, 2 ** l) for l in lengths)
    rows = tuple(
        tuple(weights[i] if graph.allowed[i][j] else Fraction(0) for j in range(graph.n))
        for i in range(graph.n)
    )
    return SubstitutionMatrix(rows, weights)


def spectral_radius(
    q: SubstitutionMatrix,
    tol: float = 1e-9,
    max_iterations: int = POWER_ITERATION_CAP,
) -> float:
    """Perron root of the substitution matrix by power iteration.

    Iterates on the shifted matrix Q + I/2, which adds 1/2 to every
    eigenvalue and makes the dominant one strictly dominant even for
    periodic graphs; the shift is subtracted from the result.  Convergence
    is judged by the Rayleigh-quotient delta falling below ``tol``.
    """
    n = q.n
    m = np.array([[float(x) for x in row] for row in q.rows]) + _SHIFT * np.eye(n)
    x = np.ones(n)
    prev = math.inf
    for _ in range(max_iterations):
        y = m @ x
        lam = float(x @ y) / float(x @ x)
        x = y / np.linalg.norm(y)
        if abs(lam - prev) < tol:
            return lam - _SHIFT
        prev = lam
    raise NonConvergence(f"power iteration did not converge in {max_iterations} steps")


def _leading_minors_positive(a: list[list[Fraction]]) -> bool:
    n = len(a)
    return all(
        exact.determinant([row[: k + 1] for row in a[: k + 1]]) > 0 for k in range(n)
    )


def _all_principal_minors_nonnegative(a: list[list[Fraction]]) -> bool:
    n = len(a)
    for size in range(1, n + 1):
        for subset in combinations(range(n), size):
            sub = [[a[i][j] for j in subset] for i in subset]
            if exact.determinant(sub) < 0:
                return False
    return True


def kraft_check(graph: TransitionGraph, lengths: LengthVector) -> KraftVerdict:
    """Decide whether the substitution matrix's radius is <1, =1 or >1.

    For n <= 12 the decision is exact, via the M-matrix criteria on I - Q:
    all leading principal minors positive iff radius < 1, and all principal
    minors nonnegative iff radius <= 1.  Larger instances fall back to the
    floating-point radius with a 1e-9 band and ``exact=False``.
    """
    if not graph.is_irreducible():
        raise NotIrreducible("the spectral test requires a strongly connected graph")
    q = substitution_matrix(graph, lengths)
    try:
        estimate = spectral_radius(q, tol=1e-9)
    except NonConvergence:
        estimate = math.nan
    if graph.n <= EXACT_MINOR_LIMIT:
        a = [
            [Fraction(i == j) - q.rows[i][j] for j in range(graph.n)]
            for i in range(graph.n)
        ]
        if _leading_minors_positive(a):
            cls = KraftClassification.STRICTLY_BELOW_ONE
        elif _all_principal_minors_nonnegative(a):
            cls = KraftClassification.EXACTLY_ONE
        else:
            cls = KraftClassification.ABOVE_ONE
        return KraftVerdict(cls, estimate, exact=True)
    if math.isnan(estimate):
        raise NonConvergence("no exact path for n > 12 and power iteration stalled")
    if estimate < 1 - 1e-9:
        cls = KraftClassification.STRICTLY_BELOW_ONE
    elif estimate <= 1 + 1e-9:
        cls = KraftClassification.EXACTLY_ONE
    else:
        cls = KraftClassification.ABOVE_ONE
    return KraftVerdict(cls, estimate, exact=False)


def kraft_block_sum(graph: TransitionGraph, lengths: LengthVector, k: int) -> Fraction:
    """Exact sum of 2^-(total bits) over all valid k-symbol sequences,
    computed as ones * Q^(k-1) * weights."""
    if k < 1:
        raise ValueError("k must be >= 1")
    q = substitution_matrix(graph, lengths)
    v = [Fraction(1)] * graph.n
    for _ in range(k - 1):
        v = exact.vec_mat(v, q.rows)
    return exact.dot(v, q.row_weights)


def counting_precheck(lengths: LengthVector) -> bool:
    """True iff no length is used by more than 2^length codewords, a cheap
    necessary condition for decodability."""
    counts = Counter(lengths)
    return all(count <= 2 ** length for length, count in counts.items())

"""Markov sources with forbidden transitions, in exact rational arithmetic.

Symbols are 0-based integers ``0..n-1`` throughout the Python API; human
readable names exist only at the CLI/file layer.  All probabilities are
``fractions.Fraction`` so that stationarity, expected lengths and similar
identities hold exactly; only entropies are floating point (they involve
irrational logarithms).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import exact
from .errors import NotIrreducible, TooLarge

Symbol = int

ENUMERATION_LIMIT = 10_000_000


def _as_fraction(value) -> Fraction:
    if isinstance(value, float):
        raise TypeError(f"refusing float probability {value!r}; use Fraction or int")
    return Fraction(value)


@dataclass(frozen=True)
class TransitionGraph:
    """Allowed-successor structure: ``allowed[i][j]`` iff j may follow i.

    Every symbol must have at least one successor, so the source can emit
    arbitrarily long sequences.
    """

    allowed: tuple[tuple[bool, ...], ...]

    def __post_init__(self):
        n = len(self.allowed)
        if n < 1:
            raise ValueError("graph needs at least one symbol")
        rows = tuple(tuple(bool(x) for x in row) for row in self.allowed)
        if any(len(row) != n for row in rows):
            raise ValueError("adjacency matrix must be square")
        if any(not any(row) for row in rows):
            raise ValueError("every symbol needs at least one allowed successor")
        object.__setattr__(self, "allowed", rows)

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[object]]) -> "TransitionGraph":
        return cls(tuple(tuple(bool(x) for x in row) for row in rows))

    @classmethod
    def fully_connected(cls, n: int) -> "TransitionGraph":
        return cls(tuple(tuple(True for _ in range(n)) for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.allowed)

    def allows(self, i: Symbol, j: Symbol) -> bool:
        return self.allowed[i][j]

    def successors(self, i: Symbol) -> tuple[Symbol, ...]:
        return tuple(j for j in range(self.n) if self.allowed[i][j])

    def is_irreducible(self) -> bool:
        """True iff the directed graph is strongly connected."""
        return self._reaches_all(False) and self._reaches_all(True)

    def _reaches_all(self, reverse: bool) -> bool:
        n = self.n
        seen = [False] * n
        stack = [0]
        seen[0] = True
        while stack:
            u = stack.pop()
            for v in range(n):
                edge = self.allowed[v][u] if reverse else self.allowed[u][v]
                if edge and not seen[v]:
                    seen[v] = True
                    stack.append(v)
        return all(seen)

    def count_sequences(self, k: int, initial: Iterable[Symbol] | None = None) -> int:
        """Number of valid k-symbol sequences (exact integer count)."""
        if k < 1:
            raise ValueError("k must be >= 1")
        firsts = range(self.n) if initial is None else sorted(set(initial))
        counts = [1 if i in set(firsts) else 0 for i in range(self.n)]
        for _ in range(k - 1):
            counts = [
                sum(counts[i] for i in range(self.n) if self.allowed[i][j])
                for j in range(self.n)
            ]
        return sum(counts)


@dataclass(frozen=True)
class Distribution:
    """Exact probability vector over the symbol alphabet."""

    probs: tuple[Fraction, ...]

    def __post_init__(self):
        probs = tuple(_as_fraction(p) for p in self.probs)
        if any(p < 0 for p in probs):
            raise ValueError("probabilities must be nonnegative")
        if sum(probs) != 1:
            raise ValueError(f"probabilities sum to {sum(probs)}, not 1")
        object.__setattr__(self, "probs", probs)

    def __iter__(self):
        return iter(self.probs)

    def __len__(self) -> int:
        return len(self.probs)

    def __getitem__(self, i: int) -> Fraction:
        return self.probs[i]

    def support(self) -> tuple[Symbol, ...]:
        return tuple(i for i, p in enumerate(self.probs) if p > 0)


@dataclass(frozen=True)
class LengthVector:
    """Codeword lengths in bits, one positive integer per symbol."""

    lengths: tuple[int, ...]

    def __post_init__(self):
        lengths = tuple(int(x) for x in self.lengths)
        if not lengths:
            raise ValueError("empty length vector")
        if any(l < 1 for l in lengths):
            raise ValueError("codeword lengths must be >= 1")
        object.__setattr__(self, "lengths", lengths)

    def __iter__(self):
        return iter(self.lengths)

    def __len__(self) -> int:
        return len(self.lengths)

    def __getitem__(self, i: int) -> int:
        return self.lengths[i]

    @property
    def l_min(self) -> int:
        return min(self.lengths)

    @property
    def l_max(self) -> int:
        return max(self.lengths)


@dataclass(frozen=True)
class MarkovSource:
    """Transition graph plus exact transition matrix and initial distribution.

    Invariants: rows of ``transitions`` sum to exactly 1, the zero pattern
    matches ``graph.allowed``, and ``initial`` is a probability vector.
    """

    graph: TransitionGraph
    transitions: tuple[tuple[Fraction, ...], ...]
    initial: tuple[Fraction, ...]

    def __post_init__(self):
        n = self.graph.n
        rows = tuple(tuple(_as_fraction(p) for p in row) for row in self.transitions)
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError("transition matrix shape does not match graph")
        for i, row in enumerate(rows):
            if any(p < 0 for p in row):
                raise ValueError(f"negative probability in row {i}")
            if sum(row) != 1:
                raise ValueError(f"row {i} sums to {sum(row)}, not 1")
            for j, p in enumerate(row):
                if (p > 0) != self.graph.allowed[i][j]:
                    raise ValueError(
                        f"transition {i}->{j}: probability {p} inconsistent with graph"
                    )
        init = tuple(_as_fraction(p) for p in self.initial)
        if len(init) != n:
            raise ValueError("initial distribution has wrong length")
        if any(p < 0 for p in init) or sum(init) != 1:
            raise ValueError("initial distribution must be a probability vector")
        object.__setattr__(self, "transitions", rows)
        object.__setattr__(self, "initial", init)

    @classmethod
    def from_rows(cls, rows, initial=None) -> "MarkovSource":
        """Build from a rational matrix; graph is its zero pattern, initial
        defaults to uniform."""
        rows = tuple(tuple(_as_fraction(p) for p in row) for row in rows)
        graph = TransitionGraph.from_rows(tuple(tuple(p > 0 for p in row) for row in rows))
        n = len(rows)
        if initial is None:
            initial = tuple(Fraction(1, n) for _ in range(n))
        return cls(graph, rows, tuple(_as_fraction(p) for p in initial))

    @property
    def n(self) -> int:
        return self.graph.n


def step_distribution(src: MarkovSource, k: int) -> Distribution:
    """Distribution of the k-th symbol (k >= 1): initial times the (k-1)-th
    matrix power, exactly."""
    if k < 1:
        raise ValueError("k must be >= 1")
    v = list(src.initial)
    for _ in range(k - 1):
        v = exact.vec_mat(v, src.transitions)
    return Distribution(tuple(v))


def stationary_distribution(src: MarkovSource) -> Distribution:
    """The unique exact solution of mu P = mu, sum(mu) = 1.

    Requires an irreducible graph; raises NotIrreducible otherwise.
    """
    if not src.graph.is_irreducible():
        raise NotIrreducible("stationary distribution needs a strongly connected graph")
    n = src.n
    # Columns of (P^T - I) give the balance equations; replace the last one
    # with the normalization constraint to get a uniquely solvable system.
    system = [
        [src.transitions[i][j] - Fraction(i == j) for i in range(n)]
        for j in range(n - 1)
    ]
    system.append([Fraction(1)] * n)
    rhs = [Fraction(0)] * (n - 1) + [Fraction(1)]
    mu = exact.solve(system, rhs)
    return Distribution(tuple(mu))


def _entropy_bits(probs: Sequence[Fraction]) -> float:
    h = 0.0
    for p in probs:
        if p > 0:
            pf = float(p)
            h -= pf * math.log2(pf)
    return h


def block_entropy(src: MarkovSource, k: int) -> float:
    """Joint entropy (bits) of the first k symbols via the chain rule:
    H(initial) plus one conditional-row term per later step.  Works for
    nonstationary initial distributions too."""
    if k < 1:
        raise ValueError("k must be >= 1")
    row_h = [_entropy_bits(row) for row in src.transitions]
    total = _entropy_bits(src.initial)
    dist = list(src.initial)
    for _ in range(2, k + 1):
        total += sum(float(p) * row_h[j] for j, p in enumerate(dist) if p > 0)
        dist = exact.vec_mat(dist, src.transitions)
    return total


def entropy_rate(src: MarkovSource) -> float:
    """Stationary per-symbol entropy (bits), sum of mu-weighted row entropies."""
    mu = stationary_distribution(src)
    return sum(float(p) * _entropy_bits(src.transitions[j]) for j, p in enumerate(mu))


def expected_code_length(src: MarkovSource, lengths: LengthVector, k: int) -> Fraction:
    """Exact expected total bits for coding the first k symbols with fixed
    per-symbol codeword lengths."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(lengths) != src.n:
        raise ValueError("length vector does not match alphabet size")
    total = Fraction(0)
    dist = list(src.initial)
    for step in range(1, k + 1):
        total += sum((p * l for p, l in zip(dist, lengths)), Fraction(0))
        if step < k:
            dist = exact.vec_mat(dist, src.transitions)
    return total


def enumerate_valid_sequences(
    graph: TransitionGraph,
    k: int,
    initial: Iterable[Symbol] | None = None,
    limit: int = ENUMERATION_LIMIT,
) -> list[tuple[Symbol, ...]]:
    """All valid k-symbol sequences, in lexicographic order.

    ``initial`` restricts the first symbol; by default any symbol may start.
    Raises TooLarge when the exact count exceeds ``limit``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    count = graph.count_sequences(k, initial)
    if count > limit:
        raise TooLarge(f"{count} sequences exceed the enumeration limit {limit}")
    firsts = tuple(range(graph.n)) if initial is None else tuple(sorted(set(initial)))
    out: list[tuple[Symbol, ...]] = []
    seq: list[Symbol] = []

    def rec(options: tuple[Symbol, ...]):
        for s in options:
            seq.append(s)
            if len(seq) == k:
                out.append(tuple(seq))
            else:
                rec(graph.successors(s))
            seq.pop()

    rec(firsts)
    return out

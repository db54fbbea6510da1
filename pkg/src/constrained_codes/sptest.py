"""Constrained Sardinas-Patterson decodability test with labeled suffixes.

The classic test compares dangling suffixes against the whole codebook; here
every dangling suffix carries two symbol labels.  The left label is the last
symbol of the parse that is *behind* (so only codewords allowed to follow it
may be compared against the suffix), the right label is the symbol whose
codeword the *ahead* parse is currently inside.  Iterating the labeled sets
classifies a codebook as decodable with finite delay (the sets reach empty),
decodable with unbounded delay (the sets cycle) or not uniquely decodable,
in which case a concrete pair of colliding sequences is reconstructed from
back-pointers.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .errors import WrongVerdict
from .model import LengthVector, Symbol, TransitionGraph

Parse = tuple[Symbol, ...]


@dataclass(frozen=True)
class Codebook:
    """One nonempty bitstring per symbol; words are pairwise distinct so a
    single-symbol sequence is always decodable."""

    words: tuple[str, ...]

    def __post_init__(self):
        words = tuple(str(w) for w in self.words)
        if not words:
            raise ValueError("empty codebook")
        for w in words:
            if not w or any(c not in "01" for c in w):
                raise ValueError(f"codeword {w!r} is not a nonempty bitstring")
        if len(set(words)) != len(words):
            raise ValueError("codewords must be pairwise distinct")
        object.__setattr__(self, "words", words)

    @property
    def n(self) -> int:
        return len(self.words)

    def lengths(self) -> LengthVector:
        return LengthVector(tuple(len(w) for w in self.words))


@dataclass(frozen=True, order=True)
class LabeledSuffix:
    """A dangling suffix ``bits`` labeled by the behind parse's last symbol
    (``left``) and the symbol whose codeword contains the suffix (``right``)."""

    left: Symbol
    bits: str
    right: Symbol


@dataclass(frozen=True)
class FollowSets:
    """Per-symbol sets of codewords that may follow it."""

    codewords: tuple[frozenset[str], ...]


class SpVerdict(Enum):
    DECODABLE_FINITE_DELAY = "decodable_finite_delay"
    DECODABLE_INFINITE_DELAY = "decodable_infinite_delay"
    NOT_DECODABLE = "not_decodable"


@dataclass(frozen=True)
class SpReport:
    verdict: SpVerdict
    sets: tuple[frozenset[LabeledSuffix], ...]
    delay_bound_bits: int | None = None
    witness: tuple[Parse, Parse] | None = None


def follow_sets(graph: TransitionGraph, code: Codebook) -> FollowSets:
    if graph.n != code.n:
        raise ValueError("graph and codebook disagree on alphabet size")
    return FollowSets(
        tuple(
            frozenset(code.words[j] for j in graph.successors(i))
            for i in range(graph.n)
        )
    )


def _shortest_context_paths(
    graph: TransitionGraph, firsts: tuple[Symbol, ...]
) -> dict[Symbol, Parse]:
    """Lexicographically-smallest shortest valid sequence ending at each
    reachable symbol (BFS from the allowed first symbols)."""
    paths: dict[Symbol, Parse] = {}
    queue: deque[Symbol] = deque()
    for s in firsts:
        if s not in paths:
            paths[s] = (s,)
            queue.append(s)
    while queue:
        u = queue.popleft()
        for v in graph.successors(u):
            if v not in paths:
                paths[v] = paths[u] + (v,)
                queue.append(v)
    return paths


def _initial_suffixes(
    graph: TransitionGraph,
    code: Codebook,
    first_symbols: Iterable[Symbol] | None,
) -> dict[LabeledSuffix, tuple[Parse, Parse]]:
    """Seed set of dangling suffixes with their (behind, ahead) parse pair.

    By default any symbol may start a sequence, so every ordered codeword
    pair is eligible.  With restricted first symbols, a divergence pair must
    either start the sequence outright or jointly follow some reachable
    symbol; in the latter case a shortest valid context path realizes it and
    is prepended to both parses so witnesses stay valid.
    """
    words = code.words
    n = code.n
    seeds: dict[LabeledSuffix, tuple[Parse, Parse]] = {}

    def offer(i: Symbol, j: Symbol, context: Parse) -> None:
        if i != j and words[j].startswith(words[i]):
            suf = LabeledSuffix(i, words[j][len(words[i]):], j)
            seeds.setdefault(suf, (context + (i,), context + (j,)))

    if first_symbols is None:
        for i in range(n):
            for j in range(n):
                offer(i, j, ())
        return seeds

    firsts = tuple(sorted(set(first_symbols)))
    if not firsts:
        raise ValueError("first_symbols must not be empty")
    for i in firsts:
        for j in firsts:
            offer(i, j, ())
    contexts = _shortest_context_paths(graph, firsts)
    for s in sorted(contexts):
        succ = graph.successors(s)
        for i in succ:
            for j in succ:
                offer(i, j, contexts[s])
    return seeds


def sp_test(
    graph: TransitionGraph,
    code: Codebook,
    first_symbols: Iterable[Symbol] | None = None,
) -> SpReport:
    """Run the labeled suffix-set iteration and classify the codebook.

    Each round compares every suffix only against the codewords allowed to
    follow its left label: equality means two complete parses of the same
    bitstring exist (not decodable; the parses become the witness), a suffix
    that is a proper prefix of a codeword swaps the parse roles, and a
    codeword that is a proper prefix of a suffix keeps them.  The iteration
    always terminates: the sets either empty out, or repeat and the code is
    decodable only with unbounded lookahead.
    """
    if graph.n != code.n:
        raise ValueError("graph and codebook disagree on alphabet size")
    words = code.words
    l_max = code.lengths().l_max

    current = _initial_suffixes(graph, code, first_symbols)
    sets: list[frozenset[LabeledSuffix]] = [frozenset(current)]
    seen: set[frozenset[LabeledSuffix]] = {sets[0]}

    while current:
        nxt: dict[LabeledSuffix, tuple[Parse, Parse]] = {}
        for suf in sorted(current):
            behind, ahead = current[suf]
            for t in graph.successors(suf.left):
                w = words[t]
                if w == suf.bits:
                    return SpReport(
                        verdict=SpVerdict.NOT_DECODABLE,
                        sets=tuple(sets),
                        witness=(behind + (t,), ahead),
                    )
                if w.startswith(suf.bits):
                    new = LabeledSuffix(suf.right, w[len(suf.bits):], t)
                    nxt.setdefault(new, (ahead, behind + (t,)))
                elif suf.bits.startswith(w):
                    new = LabeledSuffix(t, suf.bits[len(w):], suf.right)
                    nxt.setdefault(new, (behind + (t,), ahead))
        key = frozenset(nxt)
        sets.append(key)
        if nxt and key in seen:
            return SpReport(
                verdict=SpVerdict.DECODABLE_INFINITE_DELAY,
                sets=tuple(sets),
            )
        seen.add(key)
        current = nxt

    return SpReport(
        verdict=SpVerdict.DECODABLE_FINITE_DELAY,
        sets=tuple(sets),
        delay_bound_bits=len(sets) * l_max,
    )


def classic_sp_test(code: Codebook) -> SpReport:
    """Unconstrained baseline: the same test on a fully connected graph."""
    return sp_test(TransitionGraph.fully_connected(code.n), code)


def delay_bound(report: SpReport, code: Codebook) -> int:
    """Upper bound (bits) on decoding delay for a finite-delay verdict: the
    index of the first empty suffix set times the longest codeword.  This is
    a bound, not the exact delay."""
    if report.verdict is not SpVerdict.DECODABLE_FINITE_DELAY:
        raise WrongVerdict(f"delay bound undefined for verdict {report.verdict.value}")
    return len(report.sets) * code.lengths().l_max

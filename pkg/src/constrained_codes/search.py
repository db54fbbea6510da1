"""Brute-force ground truth and exhaustive codebook search.

``brute_force_ud`` decides unique decodability over *all* valid sequences
whose encodings fit a bit budget: it is injectivity of the encoding map.
Collisions can only occur between sequences of equal encoded length, so the
oracle compares, per bit length, the exact number of valid sequences with
the exact number of distinct encodings (the latter counted on the
determinized bit automaton of the graph/codebook pair).  The first length
where the two counts disagree is then enumerated literally, in lexicographic
sequence order, to extract the earliest colliding pair.  This keeps the
oracle exact at budgets where a full enumeration would be astronomically
large, while staying completely independent of the suffix-set test.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import exact
from .errors import TooLarge
from .model import (
    LengthVector,
    MarkovSource,
    Symbol,
    TransitionGraph,
    enumerate_valid_sequences,
    stationary_distribution,
)
from .spectral import KraftClassification, counting_precheck, kraft_check
from .sptest import Codebook, SpReport, SpVerdict, sp_test

Parse = tuple[Symbol, ...]

BUDGET_CAP = 4096
SUBSET_CAP = 200_000
EXTRACTION_CAP = 2_000_000
SEARCH_MAX_SYMBOLS = 6
SEARCH_MAX_LEN = 4


@dataclass(frozen=True)
class CollisionWitness:
    """Two distinct valid sequences sharing one encoding."""

    seq_a: Parse
    seq_b: Parse
    bits: str


@dataclass(frozen=True)
class SearchEntry:
    codebook: Codebook
    verdict: SpVerdict
    avg_bits_per_symbol: Fraction | None


@dataclass(frozen=True)
class SearchResult:
    entries: tuple[SearchEntry, ...]


def _sequence_counts(graph: TransitionGraph, words: tuple[str, ...], budget: int) -> list[int]:
    """counts[b] = number of valid sequences whose encoding has exactly b bits."""
    n = graph.n
    lens = [len(w) for w in words]
    counts = [0] * (budget + 1)
    # ending[b][s] = number of valid sequences with b encoded bits ending at s
    ending = [[0] * n for _ in range(budget + 1)]
    for s in range(n):
        if lens[s] <= budget:
            ending[lens[s]][s] += 1
    for b in range(budget + 1):
        for s in range(n):
            c = ending[b][s]
            if c:
                counts[b] += c
                for t in graph.successors(s):
                    nb = b + lens[t]
                    if nb <= budget:
                        ending[nb][t] += c
    return counts


def _distinct_encoding_counts(
    graph: TransitionGraph, words: tuple[str, ...], budget: int
) -> list[int]:
    """counts[b] = number of distinct bitstrings of length b that encode at
    least one valid sequence, via subset construction on the bit automaton."""
    n = graph.n
    # NFA states: -1 = start, else s * (l_max+1) + p with 1 <= p <= len(words[s])
    def advance(state: int, bit: str) -> list[int]:
        out = []
        if state == -1:
            for s in range(n):
                if words[s][0] == bit:
                    out.append((s, 1))
            return out
        s, p = state
        w = words[s]
        if p < len(w):
            if w[p] == bit:
                out.append((s, p + 1))
        else:
            for t in graph.successors(s):
                if words[t][0] == bit:
                    out.append((t, 1))
        return out

    def accepting(subset: frozenset) -> bool:
        return any(st != -1 and st[1] == len(words[st[0]]) for st in subset)

    start = frozenset([-1])
    counts = [0] * (budget + 1)
    layer: dict[frozenset, int] = {start: 1}
    transition_cache: dict[tuple[frozenset, str], frozenset] = {}
    seen_subsets = {start}
    for b in range(1, budget + 1):
        nxt: dict[frozenset, int] = {}
        for subset, cnt in layer.items():
            for bit in "01":
                key = (subset, bit)
                target = transition_cache.get(key)
                if target is None:
                    acc: set = set()
                    for st in subset:
                        acc.update(advance(st, bit))
                    target = frozenset(acc)
                    transition_cache[key] = target
                    seen_subsets.add(target)
                    if len(seen_subsets) > SUBSET_CAP:
                        raise TooLarge(
                            f"bit-automaton determinization exceeded {SUBSET_CAP} states"
                        )
                if target:
                    nxt[target] = nxt.get(target, 0) + cnt
        layer = nxt
        counts[b] = sum(cnt for subset, cnt in layer.items() if accepting(subset))
        if not layer:
            break
    return counts


def _extract_collision(
    graph: TransitionGraph, words: tuple[str, ...], target_bits: int
) -> CollisionWitness:
    """Literal enumeration of the collision class: all valid sequences whose
    encoding is exactly ``target_bits`` long, in lexicographic order."""
    n = graph.n
    lens = [len(w) for w in words]
    # reach[r][s]: a valid continuation from s can consume exactly r more bits
    reach = [[False] * n for _ in range(target_bits + 1)]
    reach[0] = [True] * n
    for r in range(1, target_bits + 1):
        for s in range(n):
            reach[r][s] = any(
                lens[t] <= r and reach[r - lens[t]][t] for t in graph.successors(s)
            )

    first_seen: dict[str, Parse] = {}
    emitted = 0

    def rec(seq: list[Symbol], bits: str) -> CollisionWitness | None:
        nonlocal emitted
        options = range(n) if not seq else graph.successors(seq[-1])
        for t in options:
            nb_len = len(bits) + lens[t]
            if nb_len > target_bits:
                continue
            rest = target_bits - nb_len
            if not reach[rest][t]:
                continue
            nb = bits + words[t]
            seq.append(t)
            if nb_len == target_bits:
                emitted += 1
                if emitted > EXTRACTION_CAP:
                    raise TooLarge(
                        f"collision extraction exceeded {EXTRACTION_CAP} sequences"
                    )
                other = first_seen.get(nb)
                if other is not None:
                    hit = CollisionWitness(other, tuple(seq), nb)
                    seq.pop()
                    return hit
                first_seen[nb] = tuple(seq)
            else:
                hit = rec(seq, nb)
                if hit is not None:
                    seq.pop()
                    return hit
            seq.pop()
        return None

    hit = rec([], "")
    if hit is None:
        raise AssertionError("count mismatch promised a collision; none found")
    return hit


def brute_force_ud(
    graph: TransitionGraph, code: Codebook, bit_budget: int
) -> CollisionWitness | None:
    """Search all valid sequences with encodings up to ``bit_budget`` bits for
    two distinct ones with the same encoding.

    Returns the earliest collision in (encoded length, lexicographic) order,
    or None if the encoding map is injective within the budget.
    """
    if graph.n != code.n:
        raise ValueError("graph and codebook disagree on alphabet size")
    if bit_budget < 1:
        raise ValueError("bit budget must be >= 1")
    if bit_budget > BUDGET_CAP:
        raise TooLarge(f"bit budget {bit_budget} exceeds the cap {BUDGET_CAP}")
    words = code.words
    seq_counts = _sequence_counts(graph, words, bit_budget)
    enc_counts = _distinct_encoding_counts(graph, words, bit_budget)
    for b in range(1, bit_budget + 1):
        if seq_counts[b] != enc_counts[b]:
            return _extract_collision(graph, words, b)
    return None


def code_length_profile(
    graph: TransitionGraph, lengths: LengthVector, k: int
) -> dict[int, int]:
    """Exact histogram {total encoded bits: count} over all valid k-symbol
    sequences, by direct enumeration."""
    if len(lengths) != graph.n:
        raise ValueError("length vector does not match graph size")
    profile = Counter(
        sum(lengths[s] for s in seq) for seq in enumerate_valid_sequences(graph, k)
    )
    return dict(sorted(profile.items()))


def within_counting_bound(profile: dict[int, int]) -> bool:
    """True iff every length class could consist of distinct bitstrings."""
    return all(count <= 2 ** bits for bits, count in profile.items())


def _codebooks_for_lengths(lengths: tuple[int, ...]) -> list[tuple[str, ...]]:
    """All assignments of pairwise distinct words with the given lengths whose
    first word starts with '0' (one representative per global bit-complement
    orbit)."""
    n = len(lengths)
    pools = [
        ["".join(bits) for bits in product("01", repeat=l)] for l in lengths
    ]
    out: list[tuple[str, ...]] = []
    chosen: list[str] = []

    def rec(i: int) -> None:
        if i == n:
            out.append(tuple(chosen))
            return
        for w in pools[i]:
            if i == 0 and w[0] != "0":
                continue
            if w in chosen:
                continue
            chosen.append(w)
            rec(i + 1)
            chosen.pop()

    rec(0)
    return out


def search_codebooks(
    graph: TransitionGraph,
    max_len: int,
    transitions=None,
    threads: int = 1,
) -> SearchResult:
    """Exhaustively find decodable codebooks with word lengths <= max_len.

    Length vectors failing the counting precheck or already above the
    spectral bound are pruned before any words are assigned.  When a
    transition matrix is supplied, each surviving codebook is annotated with
    its exact stationary bits-per-symbol and the result is sorted by it.
    Shards (one per length vector) are independent, so they can be evaluated
    on a thread pool; the merge order is deterministic either way.
    """
    n = graph.n
    if n > SEARCH_MAX_SYMBOLS or not 1 <= max_len <= SEARCH_MAX_LEN:
        raise TooLarge(
            f"search guard: n <= {SEARCH_MAX_SYMBOLS} and max_len <= {SEARCH_MAX_LEN}"
        )
    mu = None
    if transitions is not None:
        from .model import stationary_distribution

        src = MarkovSource(
            graph,
            tuple(tuple(Fraction(p) for p in row) for row in transitions),
            tuple(Fraction(1, n) for _ in range(n)),
        )
        mu = stationary_distribution(src)
    prunable = graph.is_irreducible()

    vectors = []
    for lengths in product(range(1, max_len + 1), repeat=n):
        lv = LengthVector(lengths)
        if not counting_precheck(lv):
            continue
        if prunable and kraft_check(graph, lv).classification is KraftClassification.ABOVE_ONE:
            continue
        vectors.append(lengths)

    def shard(lengths: tuple[int, ...]) -> list[SearchEntry]:
        found = []
        for words in _codebooks_for_lengths(lengths):
            code = Codebook(words)
            report = sp_test(graph, code)
            if report.verdict is SpVerdict.NOT_DECODABLE:
                continue
            avg = None
            if mu is not None:
                avg = exact.dot(tuple(mu), tuple(Fraction(l) for l in lengths))
            found.append(SearchEntry(code, report.verdict, avg))
        return found

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            shards = list(pool.map(shard, vectors))
    else:
        shards = [shard(v) for v in vectors]

    entries = [entry for batch in shards for entry in batch]
    if mu is not None:
        entries.sort(key=lambda e: (e.avg_bits_per_symbol, e.codebook.words))
    else:
        entries.sort(key=lambda e: e.codebook.words)
    return SearchResult(tuple(entries))

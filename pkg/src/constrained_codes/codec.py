"""Encoding, decoding and the per-state Huffman baseline.

Encoding is plain concatenation of codewords.  Decoding runs a dynamic
program over (bit position, last symbol) cells, which is worst-case
polynomial regardless of how many tokenizations the raw bitstring has, and
doubles as an ambiguity detector.  ``StreamDecoder`` keeps the set of live
partial parses and emits a symbol as soon as every live parse agrees on it.

Bitstrings travel as ASCII '0'/'1' text; ``pack_bits``/``unpack_bits``
convert to a packed byte form (4-byte big-endian bit count, then payload
bytes, most significant bit first, final byte zero-padded).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from . import exact
from .errors import AmbiguousParse, InvalidSequence, NoParse, NotUniquelyDecodable
from .model import MarkovSource, Symbol, TransitionGraph
from .sptest import Codebook, SpVerdict, sp_test

Parse = tuple[Symbol, ...]


def encode(graph: TransitionGraph, code: Codebook, seq: Iterable[Symbol]) -> str:
    """Concatenate the codewords of a valid symbol sequence."""
    symbols = tuple(seq)
    if not symbols:
        raise InvalidSequence("cannot encode an empty sequence")
    n = graph.n
    for s in symbols:
        if not 0 <= s < n:
            raise InvalidSequence(f"symbol {s} outside alphabet 0..{n - 1}")
    for a, b in zip(symbols, symbols[1:]):
        if not graph.allows(a, b):
            raise InvalidSequence(f"transition {a}->{b} is forbidden")
    return "".join(code.words[s] for s in symbols)


def _check_bits(bits: str) -> None:
    if any(c not in "01" for c in bits):
        raise ValueError("bitstring may only contain '0' and '1'")


def decode(
    graph: TransitionGraph,
    code: Codebook,
    bits: str,
    verify_code: bool = False,
) -> Parse:
    """Recover the unique valid sequence whose encoding equals ``bits``.

    Cell (p, s) of the DP is reachable iff some valid parse of the first p
    bits ends with symbol s; parse counts saturate at 2, so the decoder
    reports AmbiguousParse with two concrete parses whenever the input has
    several, and NoParse when it has none.  ``verify_code=True`` additionally
    runs the decodability test up front.
    """
    if graph.n != code.n:
        raise ValueError("graph and codebook disagree on alphabet size")
    _check_bits(bits)
    if verify_code and sp_test(graph, code).verdict is SpVerdict.NOT_DECODABLE:
        raise NotUniquelyDecodable("codebook fails the decodability test for this graph")

    words = code.words
    total = len(bits)
    start = (0, None)
    counts: dict[tuple[int, Symbol | None], int] = {start: 1}
    preds: dict[tuple[int, Symbol | None], list[tuple[int, Symbol | None]]] = {}
    by_pos: dict[int, list[tuple[int, Symbol | None]]] = {0: [start]}

    for pos in range(total):
        for cell in by_pos.get(pos, ()):
            last = cell[1]
            options = range(graph.n) if last is None else graph.successors(last)
            for t in options:
                w = words[t]
                end = pos + len(w)
                if end <= total and bits.startswith(w, pos):
                    nxt = (end, t)
                    if nxt not in counts:
                        counts[nxt] = 0
                        preds[nxt] = []
                        by_pos.setdefault(end, []).append(nxt)
                    counts[nxt] = min(2, counts[nxt] + counts[cell])
                    if len(preds[nxt]) < 2:
                        preds[nxt].append(cell)

    accepting = [(total, s) for s in range(graph.n) if counts.get((total, s), 0) > 0]
    weight = sum(counts[c] for c in accepting)
    if weight == 0:
        raise NoParse(f"{bits!r} does not encode any valid sequence")

    parses: list[Parse] = []

    def backtrack(cell: tuple[int, Symbol | None], tail: Parse) -> None:
        if len(parses) == 2:
            return
        if cell == start:
            parses.append(tail)
            return
        for prev in preds[cell]:
            backtrack(prev, (cell[1],) + tail)
            if len(parses) == 2:
                return

    for cell in accepting:
        backtrack(cell, ())
        if len(parses) == 2:
            break
    if weight >= 2:
        raise AmbiguousParse(parses)
    return parses[0]


class StreamDecoder:
    """Incremental decoder over one bitstream (single use, single thread).

    Feed bits with :meth:`push`; each call returns the symbols that became
    unambiguous.  Call :meth:`finish` at end of input to flush the rest.
    ``emission_log`` records (symbol, bits consumed at emission) pairs.
    """

    def __init__(
        self,
        graph: TransitionGraph,
        code: Codebook,
        verify_code: bool = True,
    ):
        if graph.n != code.n:
            raise ValueError("graph and codebook disagree on alphabet size")
        if verify_code and sp_test(graph, code).verdict is SpVerdict.NOT_DECODABLE:
            raise NotUniquelyDecodable(
                "codebook fails the decodability test for this graph"
            )
        self._graph = graph
        self._words = code.words
        # live hypothesis: (parse so far, bits not yet attributed to a word)
        self._hyps: list[tuple[Parse, str]] = [((), "")]
        self._emitted: list[Symbol] = []
        self._bits_seen = 0
        self._log: list[tuple[Symbol, int]] = []
        self._finished = False

    @property
    def emitted(self) -> Parse:
        return tuple(self._emitted)

    @property
    def bits_consumed(self) -> int:
        return self._bits_seen

    @property
    def emission_log(self) -> tuple[tuple[Symbol, int], ...]:
        return tuple(self._log)

    def push(self, bit: str) -> list[Symbol]:
        if self._finished:
            raise RuntimeError("decoder already finished")
        if bit not in ("0", "1"):
            raise ValueError(f"expected '0' or '1', got {bit!r}")
        self._bits_seen += 1
        new: list[tuple[Parse, str]] = []
        for parse, pending in self._hyps:
            grown = pending + bit
            options = (
                range(self._graph.n) if not parse else self._graph.successors(parse[-1])
            )
            keep_pending = False
            for t in options:
                w = self._words[t]
                if w == grown:
                    new.append((parse + (t,), ""))
                elif w.startswith(grown):
                    keep_pending = True
            if keep_pending:
                new.append((parse, grown))
        if not new:
            raise NoParse(f"input is not a prefix of any valid encoding at bit {self._bits_seen}")
        self._hyps = new
        return self._drain()

    def _drain(self) -> list[Symbol]:
        out: list[Symbol] = []
        while True:
            done = len(self._emitted)
            candidates = {
                parse[done] for parse, _ in self._hyps if len(parse) > done
            }
            undecided = any(len(parse) <= done for parse, _ in self._hyps)
            if undecided or len(candidates) != 1:
                return out
            sym = candidates.pop()
            self._emitted.append(sym)
            self._log.append((sym, self._bits_seen))
            out.append(sym)

    def finish(self) -> list[Symbol]:
        """Resolve end of input: exactly one complete parse must remain."""
        if self._finished:
            raise RuntimeError("decoder already finished")
        self._finished = True
        complete = [parse for parse, pending in self._hyps if pending == "" and parse]
        if not complete:
            raise NoParse("input ended in the middle of a codeword or was empty")
        if len(complete) > 1:
            raise AmbiguousParse(complete[:2])
        parse = complete[0]
        rest = list(parse[len(self._emitted):])
        for sym in rest:
            self._emitted.append(sym)
            self._log.append((sym, self._bits_seen))
        return rest


def stream_decode(
    graph: TransitionGraph,
    code: Codebook,
    bits: Iterable[str],
    verify_code: bool = True,
) -> Iterator[Symbol]:
    """Generator form of :class:`StreamDecoder`."""
    dec = StreamDecoder(graph, code, verify_code=verify_code)
    for bit in bits:
        yield from dec.push(bit)
    yield from dec.finish()


@dataclass(frozen=True)
class ConditionalHuffman:
    """Optimal prefix-free code per source state.

    ``first_words[s]`` covers symbols in the initial distribution's support,
    ``row_words[i][s]`` those in row i's support; entries outside a support
    are None.  A single-symbol support gets the empty codeword: a forced
    symbol carries no information.
    """

    first_words: tuple[str | None, ...]
    row_words: tuple[tuple[str | None, ...], ...]


def _huffman_words(weighted: list[tuple[Symbol, Fraction]], n: int) -> tuple[str | None, ...]:
    """Huffman code over one support with fixed tie-breaking: the heap orders
    by (weight, smallest symbol index), and the lower-index subtree takes the
    '0' branch, so the codebook is reproducible byte for byte."""
    words: list[str | None] = [None] * n
    if len(weighted) == 1:
        words[weighted[0][0]] = ""
        return tuple(words)
    heap: list[tuple[Fraction, int, object]] = [
        (weight, sym, sym) for sym, weight in weighted
    ]
    heapq.heapify(heap)
    while len(heap) > 1:
        w_a, idx_a, tree_a = heapq.heappop(heap)
        w_b, idx_b, tree_b = heapq.heappop(heap)
        if idx_b < idx_a:
            tree_a, tree_b = tree_b, tree_a
        heapq.heappush(heap, (w_a + w_b, min(idx_a, idx_b), (tree_a, tree_b)))

    def assign(tree: object, prefix: str) -> None:
        if isinstance(tree, tuple):
            assign(tree[0], prefix + "0")
            assign(tree[1], prefix + "1")
        else:
            words[tree] = prefix

    assign(heap[0][2], "")
    return tuple(words)


def build_conditional_huffman(src: MarkovSource) -> ConditionalHuffman:
    n = src.n
    first = _huffman_words(
        [(s, p) for s, p in enumerate(src.initial) if p > 0], n
    )
    rows = tuple(
        _huffman_words([(s, p) for s, p in enumerate(row) if p > 0], n)
        for row in src.transitions
    )
    return ConditionalHuffman(first, rows)


def huffman_expected_length(src: MarkovSource, k: int) -> Fraction:
    """Exact expected bits for coding the first k symbols with the per-state
    Huffman baseline."""
    if k < 1:
        raise ValueError("k must be >= 1")
    hc = build_conditional_huffman(src)
    total = sum(
        (p * len(hc.first_words[s]) for s, p in enumerate(src.initial) if p > 0),
        Fraction(0),
    )
    row_cost = [
        sum(
            (p * len(words[s]) for s, p in enumerate(row) if p > 0),
            Fraction(0),
        )
        for row, words in zip(src.transitions, hc.row_words)
    ]
    dist = list(src.initial)
    for _ in range(2, k + 1):
        total += sum((p * row_cost[j] for j, p in enumerate(dist)), Fraction(0))
        dist = exact.vec_mat(dist, src.transitions)
    return total


def pack_bits(bits: str) -> bytes:
    """Pack to bytes: u32 big-endian bit count, payload MSB-first, final
    partial byte zero-padded."""
    _check_bits(bits)
    count = len(bits)
    payload = bytearray((count + 7) // 8)
    for i, c in enumerate(bits):
        if c == "1":
            payload[i // 8] |= 0x80 >> (i % 8)
    return count.to_bytes(4, "big") + bytes(payload)


def unpack_bits(data: bytes) -> str:
    """Inverse of :func:`pack_bits`; rejects inconsistent lengths and nonzero
    padding so the mapping is bit-exact both ways."""
    if len(data) < 4:
        raise ValueError("packed bitstring missing its 4-byte length header")
    count = int.from_bytes(data[:4], "big")
    payload = data[4:]
    if len(payload) != (count + 7) // 8:
        raise ValueError(
            f"payload is {len(payload)} bytes but {count} bits need {(count + 7) // 8}"
        )
    bits = "".join(
        "1" if payload[i // 8] & (0x80 >> (i % 8)) else "0" for i in range(count)
    )
    if count % 8:
        tail = payload[-1] & ((1 << (8 - count % 8)) - 1)
        if tail:
            raise ValueError("nonzero padding bits in final byte")
    return bits

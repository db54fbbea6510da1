"""Exception types shared across the package.

The CLI maps InvalidSequence, NoParse and AmbiguousParse to stable exit
codes (2, 3 and 4); everything else is an ordinary error.
"""

from __future__ import annotations


class NotIrreducible(Exception):
    """The transition graph is not strongly connected."""


class NonConvergence(Exception):
    """Power iteration failed to converge within the iteration cap."""


class TooLarge(Exception):
    """An enumeration or search guard tripped; see message for the limit."""


class InvalidSequence(Exception):
    """A symbol sequence violates the transition constraints."""


class NoParse(Exception):
    """A bitstring is not the encoding of any valid symbol sequence."""


class AmbiguousParse(Exception):
    """A bitstring has at least two distinct valid parses.

    ``parses`` carries two of them (as tuples of symbol indices).
    """

    def __init__(self, parses, message: str | None = None):
        self.parses = tuple(tuple(p) for p in parses)
        super().__init__(message or f"ambiguous input: {self.parses[0]} vs {self.parses[1]}")


class NotUniquelyDecodable(Exception):
    """A codebook failed the decodability test for the given graph."""


class WrongVerdict(Exception):
    """An operation was applied to a report with an incompatible verdict."""


class SpecFileError(Exception):
    """A source description file is malformed; message names the field."""

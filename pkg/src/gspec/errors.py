"""Exception types shared across the package."""

from __future__ import annotations


class GspecError(Exception):
    """Base class for every error raised by this package."""


class ParseError(GspecError):
    """A document is structurally invalid (JSON shape, missing field, bad value)."""


class DuplicateId(GspecError):
    """A node id was added twice to the same graph."""


class UnknownNode(GspecError):
    """A referenced node id is not present in the store."""


class UnknownEndpoint(GspecError):
    """An edge references an endpoint that is not present in the store."""


class UnknownInterface(GspecError):
    """An edge uses an interface outside the declared vocabulary."""


class UnknownClass(GspecError):
    """A class name is not part of the hierarchy."""


class UnknownShape(GspecError):
    """A shape id is not part of the policy set."""


class InvalidBounds(GspecError):
    """A shape declares an empty or nonsensical bound interval."""


class MissingReference(GspecError):
    """Delta shapes are present but no reference graph was supplied."""


class UnknownActionKind(GspecError):
    """A plan document names an action kind outside the vocabulary."""


class UnknownStatus(GspecError):
    """A status string outside the lifecycle vocabulary."""


class InvalidSpec(GspecError):
    """Topology generator parameters are unsatisfiable."""


class InvalidCounts(GspecError):
    """Scenario counts are negative or unsatisfiable for the topology."""


class InsufficientSizes(GspecError):
    """The scaling study needs more distinct sizes."""


class DegenerateInput(GspecError):
    """A fit was requested on data that cannot determine a power law."""


class AgentFailure(GspecError):
    """The planning agent raised or returned an unusable plan."""


class SoundnessError(GspecError):
    """An internal consistency assertion failed; indicates a bug, not bad input."""

"""Exception hierarchy.

Every error carries a stable ``code`` string. The CLI prints the code on
stderr, so scripts can match on it without parsing prose.
"""

from __future__ import annotations


class SpecregError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "Error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)

    def __str__(self) -> str:
        msg = super().__str__()
        return msg if msg.startswith(self.code) else f"{self.code}: {msg}"


class SelfLoop(SpecregError):
    code = "SelfLoop"


class NonPositiveWeight(SpecregError):
    code = "NonPositiveWeight"


class IsolatedVertex(SpecregError):
    code = "IsolatedVertex"


class Disconnected(SpecregError):
    code = "Disconnected"


class NotSimpleGraph(SpecregError):
    code = "NotSimpleGraph"


class InvalidVertexSet(SpecregError):
    code = "InvalidVertexSet"


class EmptySet(SpecregError):
    code = "EmptySet"


class NotDisjoint(SpecregError):
    code = "NotDisjoint"


class TooLarge(SpecregError):
    code = "TooLarge"


class ConvergenceFailure(SpecregError):
    code = "ConvergenceFailure"


class DegenerateSpectrum(SpecregError):
    code = "DegenerateSpectrum"


class EmptyCluster(SpecregError):
    code = "EmptyCluster"


class GenerationFailed(SpecregError):
    code = "GenerationFailed"


class ParseError(SpecregError):
    code = "ParseError"

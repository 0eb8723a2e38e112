"""Exception hierarchy.

Every error raised by the library derives from :class:`EdvwError`; input
validation errors additionally derive from :class:`ValueError`.
"""


class EdvwError(Exception):
    """Base class for all library errors."""


# hypergraph-core
class ParseError(EdvwError, ValueError):
    pass


class NonPositiveWeight(EdvwError, ValueError):
    pass


class UnknownVertex(EdvwError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class DuplicateMember(EdvwError, ValueError):
    pass


class DuplicateDeclaration(EdvwError, ValueError):
    pass


class VertexNotInEdge(EdvwError, ValueError):
    pass


# splitting
class DomainError(EdvwError, ValueError):
    pass


class FamilyError(EdvwError, ValueError):
    pass


class EdgeTooLarge(EdvwError, ValueError):
    pass


# reduction
class EdgeTooSmall(EdvwError, ValueError):
    pass


class TooManyAuxiliaries(EdvwError, ValueError):
    pass


class ReductionError(EdvwError):
    """Raised by the reducer; carries the offending hyperedge id."""

    def __init__(self, message, edge_id=None):
        super().__init__(message)
        self.edge_id = edge_id


class NegativeCoefficient(ReductionError, ValueError):
    pass


class AsymmetricGenerator(ReductionError, ValueError):
    pass


# sparsify
class NonConcavePoints(EdvwError, ValueError):
    pass


class InfiniteInitialSlope(EdvwError, ValueError):
    pass


class NoTangentFound(EdvwError, RuntimeError):
    pass


class MalformedEnvelope(EdvwError, ValueError):
    pass


# flownet
class SameTerminal(EdvwError, ValueError):
    pass


class GraphTooLarge(EdvwError, ValueError):
    pass


class OverlappingSeeds(EdvwError, ValueError):
    pass


class EmptySeeds(EdvwError, ValueError):
    pass


class InfeasibleSeeds(EdvwError, ValueError):
    pass


# textpipe
class EmptyVocabulary(EdvwError, ValueError):
    pass


class KeyMismatch(EdvwError, ValueError):
    pass

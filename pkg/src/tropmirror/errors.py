"""Exception hierarchy.

Every error raised by the library derives from TropmirrorError so callers can
catch at the library boundary; the CLI maps them to exit code 2 (input errors)
or 1 (check failures).
"""


class TropmirrorError(Exception):
    """Base class for all library errors."""


# -- scalar / series arithmetic -------------------------------------------

class ZeroInput(TropmirrorError):
    """Operation requires a nonzero (up to truncation) input."""


class InsufficientPrecision(TropmirrorError):
    """Stored truncation is too coarse to decide the requested quantity."""


class PrecisionLoss(TropmirrorError):
    """A valuation decision (e.g. min(0, val)) is not determined at the
    current truncation."""


class DivergentExpansion(TropmirrorError):
    """An infinite geometric/binomial expansion does not converge on the
    reference polygon (perturbation valuation not strictly positive)."""


class NonUnit(TropmirrorError):
    """Series has no unique minimal-valuation term to expand around."""


class ParseError(TropmirrorError):
    """Malformed textual or JSON input; carries location info when known."""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}, column {column})"
        super().__init__(message + loc)
        self.line = line
        self.column = column


# -- polytopes --------------------------------------------------------------

class DimensionMismatch(TropmirrorError):
    """Operands live in different ambient dimensions."""


class EmptyInput(TropmirrorError):
    """A nonempty collection was required."""


class UnboundedRegion(TropmirrorError):
    """Halfspace data describes an unbounded set where a polytope is needed."""


class PolygonNotContained(TropmirrorError):
    """Restriction target is not a subset of the reference polygon."""


class ReferenceMismatch(TropmirrorError):
    """Series operands have different reference polygons."""


# -- eigenray diagrams / nodal geometry -------------------------------------

class NonPrimitive(TropmirrorError):
    """Integer vector expected to be primitive is not."""


class OverlappingRays(TropmirrorError):
    """Eigenray diagram rays are not pairwise disjoint."""


class NonPrimitiveDirection(TropmirrorError):
    """Ray direction vector is not primitive."""


class BadOffsets(TropmirrorError):
    """Node offsets not strictly increasing from 0."""


class OrderViolation(TropmirrorError):
    """Nodal slide would break the node ordering on its ray."""


class LineObstructed(TropmirrorError):
    """Branch move requires the full eigenline to avoid all other rays."""


class NotAdmissible(TropmirrorError):
    """Polygon is not admissible for the given diagram."""


class InvalidStrips(TropmirrorError):
    """Strip/segment auxiliary data violates the disjointness requirements."""


class OnWall(TropmirrorError):
    """Chart side is ambiguous because the point lies on the wall u = 0."""


class OnDivisor(TropmirrorError):
    """Transition undefined: eta = -1 up to truncation."""


# -- gluing ------------------------------------------------------------------

class OverlapMismatch(TropmirrorError):
    """Locals disagree on an overlap; carries the first counterexample."""

    def __init__(self, message, pair=None, exponent=None):
        super().__init__(message)
        self.pair = pair
        self.exponent = exponent


class NotSmallCover(TropmirrorError):
    """Cover element violates smallness preconditions."""


class MonodromyObstruction(TropmirrorError):
    """Boundary data is inconsistent with the around-the-node monodromy."""


class VertexMismatch(TropmirrorError):
    """Adjacent boundary edges disagree at a shared vertex."""


class LoopInvalid(TropmirrorError):
    """Monodromy loop specification is unusable."""


# -- cli ----------------------------------------------------------------------

class UnknownSuite(TropmirrorError):
    """check subcommand received an unknown suite name."""

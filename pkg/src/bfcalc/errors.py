"""Exception types shared across the package."""


class BFCalcError(Exception):
    """Base class for every error raised by this package."""


class OutOfRange(BFCalcError):
    """A degree or dimension is outside the range the tables cover."""


class StemRangeExceeded(BFCalcError):
    """An exact sequence needs a stem group beyond the known table."""


class Unsupported(BFCalcError):
    """The requested map is not determined by the available results."""


class NotCharacteristic(BFCalcError):
    """A class fails the characteristic congruence <c, x> = x.x mod 2."""


class NonIntegerDimension(BFCalcError):
    """The virtual dimension formula produced a non-integer."""


class IncompatibleBoundary(BFCalcError):
    """Gluing was requested across boundaries that do not allow it."""


class PreconditionViolation(BFCalcError):
    """Inputs fail the hypotheses of the operation."""


class BadEmbedding(BFCalcError):
    """Listed classes do not span the expected plumbing lattice."""


class NoLift(BFCalcError):
    """No characteristic lift with the required dimension exists."""


class NonUnique(BFCalcError):
    """A lift is not unique because the 2-torsion hypothesis fails."""


class Inconsistent(BFCalcError):
    """Facts in a knowledge base contradict each other.

    ``chain`` carries the provenance of the conflicting facts.
    """

    def __init__(self, message: str, chain: tuple = ()):
        super().__init__(message)
        self.chain = tuple(chain)

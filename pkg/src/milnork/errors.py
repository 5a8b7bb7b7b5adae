"""Exception types shared across the engine."""


class MilnorkError(Exception):
    """Base class for all engine errors."""


class ParseError(MilnorkError):
    """Input does not conform to the expression or file grammar."""


class InvalidSpec(MilnorkError):
    """Structurally bad algebra spec (duplicate names, misplaced sigma, ...)."""


class NotArtinian(MilnorkError):
    """The quotient ring has an infinite monomial staircase."""


class NotLocal(MilnorkError):
    """Some non-constant standard monomial is not nilpotent."""


class NotAUnit(MilnorkError):
    pass


class NotOneUnit(MilnorkError):
    pass


class NameCollision(MilnorkError):
    pass


class AlgebraMismatch(MilnorkError):
    pass


class NonUnitEntry(MilnorkError):
    pass


class NotGeneratorShape(MilnorkError):
    pass


class SigmaNotDesignated(MilnorkError):
    pass


class QuotientNotLocal(MilnorkError):
    pass


class NonUnitC(MilnorkError):
    pass


class SideConditionFailed(MilnorkError):
    """A rewrite step's side condition does not hold; message carries the failed identity."""


class PositionInvalid(MilnorkError):
    pass


class PrecisionInsufficient(MilnorkError):
    """The truncation order cannot represent every atom; raise the precision."""

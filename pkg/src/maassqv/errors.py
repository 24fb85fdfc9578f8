"""Exception hierarchy shared by all modules."""


class MaassqvError(Exception):
    """Base class for all package errors."""


# quadfield
class NotSquarefree(MaassqvError):
    pass


class NotOneMod4(MaassqvError):
    pass


class NotTwoPrimeProduct(MaassqvError):
    pass


class UnitNormNotOne(MaassqvError):
    pass


class Overflow(MaassqvError):
    """Integer left the enforced 128-bit signed range."""


class ZeroElement(MaassqvError):
    pass


# ideals / hecke
class ScanBoundExceeded(MaassqvError):
    pass


class MalformedTable(MaassqvError):
    pass


class MissingPrime(MaassqvError):
    pass


class DivergentDenominator(MaassqvError):
    pass


# lattice
class BezoutRangeImpossible(MaassqvError):
    pass


class HypothesisViolated(MaassqvError):
    pass


# halfint / lfun
class EvenInput(MaassqvError):
    pass


class BadDecomposition(MaassqvError):
    pass


class BoundTooSmall(MaassqvError):
    pass


class TruncationInsufficient(MaassqvError):
    pass


class WindowViolation(MaassqvError):
    pass


class QuadratureNonconvergent(MaassqvError):
    pass


class PoleInput(MaassqvError):
    pass


class TableExhausted(MaassqvError):
    pass


class NegativeCentralValue(MaassqvError):
    pass


class EtaNegative(MaassqvError):
    pass

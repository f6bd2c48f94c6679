"""Exception types raised across the package."""


class QREError(Exception):
    """Base class for every error raised by this package."""


# ir
class PortReuse(QREError):
    pass


class DTypeMismatch(QREError):
    pass


class CycleError(QREError):
    pass


class AlreadyBit(QREError):
    pass


class DanglingWire(QREError):
    pass


class SignatureMismatch(QREError):
    pass


class RangeError(QREError, ValueError):
    pass


# symbolics
class UnboundSymbol(QREError, KeyError):
    pass


class DomainError(QREError, ValueError):
    pass


class NotPolynomial(QREError):
    pass


# resource analysis
class MissingDecomposition(QREError):
    pass


class CycleDetected(QREError):
    pass


class UncostedLeaf(QREError):
    pass


# simulation
class NotClassical(QREError):
    pass


class TooLarge(QREError):
    pass


class MissingTensor(QREError):
    pass


class BadAncillaCount(QREError, ValueError):
    pass


# stdlib
class BadEpsilon(QREError, ValueError):
    pass


class BadSize(QREError, ValueError):
    pass


class BadL(QREError, ValueError):
    pass


class BadBlockExponent(QREError, ValueError):
    pass


class OracleShapeMismatch(QREError, ValueError):
    pass


class AlphaNotOne(QREError, ValueError):
    pass


class EmptyParts(QREError, ValueError):
    pass


class NotReflection(QREError, ValueError):
    pass


class NormExceeded(QREError, ValueError):
    pass


class AngleSolveFailure(QREError):
    pass


class DegreeOverflow(QREError):
    pass


class BadWindow(QREError, ValueError):
    pass


class BadParams(QREError, ValueError):
    pass


# crypto
class EvenModulus(QREError, ValueError):
    pass


class OffCurve(QREError, ValueError):
    pass


class WindowTooLarge(QREError, ValueError):
    pass


# physical
class BadDistance(QREError, ValueError):
    pass


class BudgetInfeasible(QREError):
    pass


# cli
class UnknownBloq(QREError, KeyError):
    pass


class BadParam(QREError, ValueError):
    pass

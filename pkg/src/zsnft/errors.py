"""Exception types raised across the package."""


class ZSNFTError(Exception):
    """Base class for all package errors."""


class InvalidGrid(ZSNFTError, ValueError):
    pass


class UnsupportedProfile(ZSNFTError):
    pass


class UnsupportedEigenvalue(ZSNFTError):
    pass


class DerivativeUnsupported(ZSNFTError):
    pass


class NumericalOverflow(ZSNFTError, ArithmeticError):
    """A propagated state component exceeded the magnitude cap."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NumericalFailure(ZSNFTError, ArithmeticError):
    pass


class AmbiguousCount(ZSNFTError):
    """Argument-principle count too far from an integer to trust."""

    def __init__(self, raw):
        super().__init__(f"zero count {raw:.6g} is not close to an integer")
        self.raw = raw


class NoConvergence(ZSNFTError):
    pass


class Incomplete(ZSNFTError):
    """Fewer zeros located than expected; ``found`` holds the partial result."""

    def __init__(self, found, expected):
        super().__init__(f"located {len(found)} of {expected} zeros")
        self.found = list(found)
        self.expected = expected


class NotAnEigenvalue(ZSNFTError):
    pass


class ZeroReference(ZSNFTError, ZeroDivisionError):
    pass


class LengthMismatch(ZSNFTError, ValueError):
    pass


class NonFiniteInput(ZSNFTError, ValueError):
    pass

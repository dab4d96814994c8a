"""Exception hierarchy.

Input problems derive from :class:`InputError`, resource limits from
:class:`CapExceeded`, and anything that contradicts a theorem the library
certifies derives from :class:`TheoremViolation` so callers can report it
instead of swallowing it.
"""


class ChainCatError(Exception):
    """Base class for every error raised by chaincat."""


class InputError(ChainCatError, ValueError):
    """Malformed or inconsistent input data."""


class NotAUnit(InputError, ArithmeticError):
    pass


class ExponentOutOfRange(InputError):
    pass


class RingMismatch(InputError):
    pass


class ParentMismatch(InputError):
    pass


class NotIncreasing(InputError):
    """A chain level is not contained in the next one."""

    def __init__(self, index: int, message: str = ""):
        self.index = index
        super().__init__(message or f"chain is not increasing at level {index}")


class NonUniserialFactor(InputError):
    def __init__(self, index: int, exponents=()):
        self.index = index
        self.exponents = tuple(exponents)
        super().__init__(
            f"factor {index} is not uniserial (cyclic exponents {list(self.exponents)})"
        )


class NotInUn(InputError):
    """An object with a zero factor was passed where all factors must be nonzero."""


class ZeroObjectInInput(InputError):
    pass


class NotProper(InputError):
    pass


class NotMaximal(InputError):
    pass


class CapExceeded(ChainCatError):
    def __init__(self, what: str, size: int, cap: int):
        self.what = what
        self.size = size
        self.cap = cap
        super().__init__(f"{what}: size {size} exceeds cap {cap}")


class TheoremViolation(ChainCatError):
    """A computed structure contradicts a statement the library checks."""


class NonCommutativeQuotient(TheoremViolation):
    pass


class NoPermutation(TheoremViolation):
    pass


class HallViolation(TheoremViolation):
    pass

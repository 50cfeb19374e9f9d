"""Exception types shared across the package."""


class CassisError(Exception):
    """Base class for all domain errors raised by this package."""


class DimensionMismatchError(CassisError):
    """Operands live in spaces of different dimensions."""


class OrderUnderflowError(CassisError):
    """A jet is truncated below the order requested for an operation."""


class SingularLinearPartError(CassisError):
    """The linear part of a jet is not invertible."""


class NonAttractingError(CassisError):
    """An eigenvalue has modulus >= 1 where an attracting germ is required."""


class NotEquivariantError(CassisError):
    """A germ fails the required commutation with the group action."""


class UnsupportedJordanError(CassisError):
    """Non-diagonal linear part whose homological operator is singular.

    Normalization in the presence of a resonant Jordan block is out of scope;
    only diagonal linear parts (any resonance pattern) and non-diagonal linear
    parts with resonance-free homological operators are handled.
    """


class NotContractibleError(CassisError):
    """The intersection form is not negative definite."""


class SNCViolationError(CassisError):
    """A contraction produced a configuration outside the simple-normal-crossings class."""


class GraphStructureError(CassisError):
    """A dual graph violates a structural precondition (not a tree, bad center, ...)."""


class ClassificationError(CassisError):
    """The input document is inconsistent with every admissible classification case."""


class BadOrbifoldError(CassisError):
    """Operation requires a good orbifold but the input is a bad one."""

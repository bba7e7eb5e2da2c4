"""Exception types shared across the package.

The CLI maps these onto process exit codes: parameter/usage problems
exit 1, data problems exit 2, numerical failures and size-guard
violations exit 3.
"""


class SsbcError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(SsbcError):
    """An argument violates a documented precondition (bad shape, bad range)."""


class DataError(SsbcError):
    """Input data is unusable: I/O failure, unparseable cells, empty or degenerate sets."""


class NumericalError(SsbcError):
    """A numerical routine failed (SVD non-convergence, undefined basis)."""


class GuardError(SsbcError):
    """A dense-computation size guard was exceeded."""

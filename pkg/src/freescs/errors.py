"""Exception types raised by the library.

The CLI maps these onto its exit codes, so every numerical failure mode
has a dedicated class.
"""


class AdmissibilityError(ValueError):
    """Parameters outside the normalizable family (|zeta| >= 1, bad constants)."""


class IntegrationError(RuntimeError):
    """The adaptive ODE integration did not reach the requested time."""


class TruncationError(RuntimeError):
    """Fock truncation hit its hard cap before the tail fell below epsilon."""

    def __init__(self, message, truncation=None, tail_bound=None):
        super().__init__(message)
        self.truncation = truncation
        self.tail_bound = tail_bound


class HermiteOverflowError(OverflowError):
    """A Hermite value exceeded the magnitude guard."""

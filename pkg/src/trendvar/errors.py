"""Exception types shared across the package.

The CLI maps these onto exit codes: InputError -> 2, DegeneracyError -> 3.
Calibration failure is reported through the calibration result, not raised.
"""


class TrendvarError(Exception):
    """Base class for all package errors."""


class InputError(TrendvarError):
    """Invalid data, configuration, or file content."""


class DegeneracyError(TrendvarError):
    """Numerical degeneracy: underflowing likelihoods, zero-variance series,
    near-zero normalization means, or an all-zero combined weight vector."""

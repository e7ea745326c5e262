"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: input/format problems
exit 2, numeric failures exit 1.
"""


class FormatError(ValueError):
    """Malformed input: bad container bytes, schema violation, missing file reference."""


class NumericError(ArithmeticError):
    """Numeric failure inside a computation (SVD breakdown, excessive imaginary residual)."""

"""Exception types shared across the package.

The CLI maps ValidationError (and malformed config input generally) to exit
code 2 and NumericError to exit code 3.
"""


class ValidationError(ValueError):
    """A parameter set or configuration violates a model invariant."""


class NumericError(RuntimeError):
    """A numeric routine failed to converge or produced an invalid result."""

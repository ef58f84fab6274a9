"""Package exception types, kept deliberately small.

``DataError`` covers malformed or unusable input data; ``NumericalError``
covers estimation failures (degenerate likelihoods, singular systems).
The CLI maps them to distinct exit codes.
"""


class DataError(ValueError):
    """Input data is missing, malformed, or violates a contract."""


class NumericalError(RuntimeError):
    """A numerical procedure cannot produce a valid result."""

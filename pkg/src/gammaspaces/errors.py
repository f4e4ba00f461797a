"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Invalid parameters or an inadmissible parameter region."""


class EvaluationError(ArithmeticError):
    """A numerical evaluation produced non-finite or otherwise unusable values."""

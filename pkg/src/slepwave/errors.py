"""Exception types shared across the package."""


class DataError(ValueError):
    """A file or stream does not conform to one of the text formats."""


class NumericalError(RuntimeError):
    """A numerical routine failed hard (eigensolver, quadrature, tiling)."""

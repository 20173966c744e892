"""Exception hierarchy shared across the package.

Two top branches matter for the CLI exit-code contract: ``InputError`` maps
to exit code 2 (bad files, shapes, ranges), ``NumericError`` maps to exit
code 1 (singular solves, failed iterations).
"""


class FreeDeqError(Exception):
    pass


class InputError(FreeDeqError):
    pass


class NumericError(FreeDeqError):
    pass


class DimensionError(InputError):
    pass


class BoundsError(InputError):
    pass


class ShapeError(InputError):
    pass


class SizeError(InputError):
    pass


class OrderError(InputError):
    pass


class ProfileError(InputError):
    pass


class BlockError(InputError):
    pass


class DegenerateBlockError(InputError):
    pass


class GridError(InputError):
    pass


class SupportError(InputError):
    pass


class ParameterError(InputError):
    pass


class PoleError(InputError):
    pass


class SingularMatrixError(NumericError):
    pass


class InversionError(NumericError):
    pass


class FixedPointError(NumericError):
    """Fixed-point iteration did not converge; carries the last residual."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class CoverageError(NumericError):
    pass

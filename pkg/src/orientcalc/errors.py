"""Exception hierarchy shared by all modules.

The CLI maps every ``OrientCalcError`` to exit code 1 and reports the
class name, so names here are part of the user-visible surface.
"""


class OrientCalcError(Exception):
    """Base class for domain errors."""


class ShapeError(OrientCalcError, ValueError):
    pass


class UnsupportedModelError(OrientCalcError, ValueError):
    pass


class IncompleteDataError(OrientCalcError, ValueError):
    pass


class AdmissibilityError(OrientCalcError, ValueError):
    pass


class InternalConsistencyError(OrientCalcError, ArithmeticError):
    pass


class InconsistencyError(OrientCalcError, ValueError):
    pass


class NonConformingError(OrientCalcError, ValueError):
    pass


class RangeError(OrientCalcError, ValueError):
    pass


class PurityError(OrientCalcError, ValueError):
    pass

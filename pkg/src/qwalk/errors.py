"""Exception hierarchy shared by every module.

``InputError`` covers malformed graphs, bad parameters and violated
preconditions; ``NumericalError`` covers failures of the numerics
themselves.  The CLI maps them to exit codes 2 and 3.
"""


class QWalkError(Exception):
    pass


class InputError(QWalkError, ValueError):
    pass


class NumericalError(QWalkError, ArithmeticError):
    pass


class ResonanceWarning(UserWarning):
    """Distinct generator eigenvalues collapsed onto one phase of the walk unitary."""

# -*- coding: utf-8 -*-
"""
Exception hierarchy of flagfold.

Invalid inputs and empty neighbourhoods are the caller's fault (CLI exit 2),
numerical failures are ours or the problem's (CLI exit 3).
"""


class FlagfoldError(Exception):
    pass


class InvalidInputError(FlagfoldError, ValueError):
    pass


class EmptyNeighborhoodError(FlagfoldError):
    pass


class NumericalError(FlagfoldError, ArithmeticError):
    pass


class EigenSolverError(NumericalError):
    pass


class SingularPinchError(NumericalError):
    pass


class DegenerateMapError(NumericalError):
    pass

"""Exception hierarchy.

Every error carries a ``module`` tag so the CLI can report where a pipeline
run failed and map it onto a stable exit code.
"""

from __future__ import annotations


class KLLedgerError(Exception):
    module = "core"
    exit_code = 3


# cyclo
class CycloError(KLLedgerError):
    module = "cyclo"
    exit_code = 3


class DivisionByZero(CycloError, ZeroDivisionError):
    pass


class ZeroInput(CycloError, ValueError):
    pass


# lattice
class LatticeError(KLLedgerError):
    module = "lattice"
    exit_code = 4


class NotEven(LatticeError):
    pass


class NotPositiveDefinite(LatticeError):
    pass


class ElementOutOfRange(LatticeError):
    pass


class GroupTooLarge(LatticeError):
    pass


class NotIsotropic(LatticeError):
    pass


class BadSelfPairing(LatticeError):
    pass


class CosetCollision(LatticeError):
    pass


# rootdata
class RootDataError(KLLedgerError):
    module = "rootdata"
    exit_code = 5


class UnsupportedType(RootDataError):
    pass


class WeylTooLarge(RootDataError):
    pass


class NotDominant(RootDataError):
    pass


# nichols
class NicholsError(KLLedgerError):
    module = "nichols"
    exit_code = 6


class ComponentTooLarge(NicholsError):
    pass


class BraidingMismatch(NicholsError):
    pass


class NotHomogeneous(NicholsError):
    pass


# fusion
class FusionError(KLLedgerError):
    module = "fusion"
    exit_code = 7


class NotTransitive(FusionError):
    pass


# qseries
class QSeriesError(KLLedgerError):
    module = "qseries"
    exit_code = 8


class EllipsoidOverflow(QSeriesError):
    pass


class TailBoundUnavailable(QSeriesError):
    pass


class ScheduleTooShort(QSeriesError):
    pass


class DivisionByNearZero(QSeriesError):
    pass

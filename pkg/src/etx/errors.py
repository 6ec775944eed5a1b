"""Exception hierarchy.

Two families: :class:`InvalidInput` for unphysical or malformed parameters
and :class:`NumericalFailure` for solvers that could not deliver. The CLI maps
them to exit codes 1 and 2.
"""


class EtxError(Exception):
    pass


class InvalidInput(EtxError, ValueError):
    pass


class NumericalFailure(EtxError, ArithmeticError):
    pass


# qmath
class NonHermitianInput(InvalidInput):
    pass


class DimensionMismatch(InvalidInput):
    pass


class OverflowRisk(InvalidInput):
    pass


class ConvergenceFailure(NumericalFailure):
    pass


class EmptyKernel(NumericalFailure):
    pass


# channel
class UnphysicalChannel(InvalidInput):
    pass


class InvalidParameters(InvalidInput):
    pass


class DegenerateBlock(InvalidInput):
    pass


# liouvillian / conditions
class NotCompletelyPositive(InvalidInput):
    pass


class UnsupportedCorrelation(InvalidInput):
    pass


# dynamics
class InvalidState(InvalidInput):
    pass


class UnsupportedRegime(InvalidInput):
    pass


class StepSizeUnderflow(NumericalFailure):
    pass


class PositivityLoss(NumericalFailure):
    pass


# steady
class DegenerateSteadyState(NumericalFailure):
    pass


class NonPhysicalInput(InvalidInput):
    pass


class NoSignChange(NumericalFailure):
    """Steady state stays separable over the whole CP-admissible range.

    ``cp_bound`` carries the upper end of the searched interval.
    """

    def __init__(self, message, cp_bound):
        super().__init__(message)
        self.cp_bound = cp_bound


# cqed
class ZeroCooperativity(InvalidInput):
    pass

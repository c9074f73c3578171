"""Exception hierarchy shared by all modules."""


class SpectralBenchError(Exception):
    """Base class for every error raised by this package."""


# numkernel
class ShapeMismatch(SpectralBenchError, ValueError):
    pass


class NonFiniteValue(SpectralBenchError, ValueError):
    pass


class NonSquare(SpectralBenchError, ValueError):
    pass


class NotSymmetric(SpectralBenchError, ValueError):
    pass


class NoConvergence(SpectralBenchError, ArithmeticError):
    pass


class Singular(SpectralBenchError, ArithmeticError):
    pass


# dataset
class ParseError(SpectralBenchError, ValueError):
    def __init__(self, row, col, message=""):
        self.row = row
        self.col = col
        text = f"row {row}, column {col!r}"
        if message:
            text += f": {message}"
        super().__init__(text)


class MissingLabelColumn(SpectralBenchError, ValueError):
    pass


class EmptyDataset(SpectralBenchError, ValueError):
    pass


class ClassTooSmall(SpectralBenchError, ValueError):
    pass


class InvalidConfig(SpectralBenchError, ValueError):
    pass


# pls
class DegenerateComponent(SpectralBenchError, ArithmeticError):
    pass


class SingularPTW(SpectralBenchError, ArithmeticError):
    pass


# discriminant
class SingularWithinScatter(SpectralBenchError, ArithmeticError):
    pass


class MTooLarge(SpectralBenchError, ValueError):
    pass


class ZeroEigenvalue(SpectralBenchError, ArithmeticError):
    pass


class GammaOutOfRange(SpectralBenchError, ValueError):
    pass


# neighbors / svm
class EmptyTrainingSet(SpectralBenchError, ValueError):
    pass


class InvalidHyperparameter(SpectralBenchError, ValueError):
    pass


class DivergenceDetected(SpectralBenchError, ArithmeticError):
    pass


# metrics
class LengthMismatch(SpectralBenchError, ValueError):
    pass


class Undefined(SpectralBenchError, ArithmeticError):
    pass


# cli
class IncompatibleExport(SpectralBenchError, ValueError):
    pass

"""Exception and warning types raised across the package."""


class ModelError(ValueError):
    """Base class for invalid inputs or failed numerical problems."""


class NonPositiveTheta(ModelError):
    pass


class ProbabilityOverflow(ModelError):
    """A matching probability evaluated above one (efficiency too large)."""


class InvalidCalibration(ModelError):
    pass


class NonPositiveUpperBracket(ModelError):
    pass


class ZeroBargainingPower(ModelError):
    pass


class InfeasibleVacancy(ModelError):
    """The initial vacancy has non-positive value; no equilibrium exists."""


class NoSignChange(ModelError):
    pass


class MultipleRootsDetected(ModelError):
    def __init__(self, roots, message=None):
        self.roots = list(roots)
        super().__init__(message or f"{len(self.roots)} equilibria found: {self.roots}")


class ZeroVacancyCost(ModelError):
    pass


class OutOfRangeElasticity(ModelError):
    pass


class NonPositiveSurplus(ModelError):
    pass


class NonPositiveCost(ModelError):
    pass


class InfeasibleAtY(ModelError):
    pass


class NoRoot(ModelError):
    pass


class DegenerateLaborForce(ModelError):
    pass


class ZeroUnemployment(ModelError):
    pass


class MisalignedSeries(ModelError):
    pass


class RankDeficientDummies(ModelError):
    pass


class DataError(ValueError):
    """Base class for problems with input data files."""


class MalformedHeader(DataError):
    pass


class UnparsableRow(DataError):
    def __init__(self, line, text=""):
        self.line = line
        super().__init__(f"cannot parse line {line}: {text!r}")


class NonMonotoneDates(DataError):
    pass


class RangeNotCovered(DataError):
    pass


class NetworkUnavailable(DataError, OSError):
    pass


class SnapshotMissing(DataError, FileNotFoundError):
    pass


class NoInteriorMinimum(UserWarning):
    """The profiled objective is monotone on the search bracket."""


class StaleCacheWarning(UserWarning):
    pass

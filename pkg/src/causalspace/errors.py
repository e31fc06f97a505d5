"""Exception hierarchy shared by every module of the package."""

from fractions import Fraction


class CausalSpaceError(ValueError):
    """Base class for all errors raised by causalspace."""


# -- spaces and events -------------------------------------------------------

class DuplicateAtomId(CausalSpaceError):
    pass


class NegativeMass(CausalSpaceError):
    pass


class MassSumNotOne(CausalSpaceError):
    def __init__(self, total: Fraction, where: str = "space.atoms"):
        self.total = total
        self.deficit = 1 - total
        self.where = where
        super().__init__(f"{where}: atom masses sum to {total}, deficit {self.deficit}")


class EmptySpace(CausalSpaceError):
    pass


class ForeignEvent(CausalSpaceError):
    pass


# -- random variables ---------------------------------------------------------

class MixedSpaces(CausalSpaceError):
    pass


class ZeroMeasureConditioningEvent(CausalSpaceError):
    pass


class NameMismatch(CausalSpaceError):
    pass


class DegenerateTreatment(CausalSpaceError):
    pass


# -- observable causal systems ------------------------------------------------

class UnknownVariable(CausalSpaceError):
    pass


class UnknownIndexVariable(UnknownVariable):
    pass


class UnknownTarget(UnknownVariable):
    pass


class SelfReferentialSource(CausalSpaceError):
    pass


class NonBinaryTreatment(CausalSpaceError):
    pass


class IncompleteFamily(CausalSpaceError):
    pass


class AxiomViolation(CausalSpaceError):
    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


# -- randomization / matching / sampling ---------------------------------------

class DegenerateRandomizer(CausalSpaceError):
    pass


class ImageMismatch(CausalSpaceError):
    pass


class UnknownCovariate(UnknownVariable):
    pass


class NoPairsFound(CausalSpaceError):
    pass


class DegenerateSample(CausalSpaceError):
    pass


# -- model files, geometry, rendering -----------------------------------------

class SchemaError(CausalSpaceError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class NonPartition(CausalSpaceError):
    def __init__(self, variable: str, gap: Fraction, overlap: Fraction):
        self.variable = variable
        self.gap = gap
        self.overlap = overlap
        self.area = gap + overlap
        super().__init__(
            f"level sets of {variable!r} do not partition the unit square "
            f"(gap area {gap}, overlap area {overlap})"
        )


class NoGeometry(CausalSpaceError):
    pass

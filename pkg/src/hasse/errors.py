"""Exception hierarchy. Each class carries the diagnostic code the CLI prints."""


class HasseError(Exception):
    code = "E000"


class DimensionMismatch(HasseError, ValueError):
    code = "E101"


class IndexOutOfRange(HasseError, IndexError):
    code = "E102"


class LeibnizViolation(HasseError, ValueError):
    """A map (or family) fails its Leibniz rule; ``report`` holds the witness."""

    code = "E103"

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class IllDefinedDerivation(LeibnizViolation):
    """Generator images do not respect the module relations."""

    code = "E104"


class AlgebraAxiomError(HasseError, ValueError):
    code = "E105"


class NotInFilter(HasseError, ValueError):
    code = "E106"


class NotHigherDifferential(HasseError):
    """Some D_i fails to preserve the torsion submodule."""

    code = "E107"


class RepresentativeDependence(HasseError):
    code = "E108"


class MismatchedDerivation(HasseError, ValueError):
    code = "E109"


class InvalidArgument(HasseError, ValueError):
    code = "E110"

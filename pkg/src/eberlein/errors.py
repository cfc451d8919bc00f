"""Exception hierarchy shared by every module."""


class EberleinError(Exception):
    """Base class for all library errors."""


class InvalidInput(EberleinError, ValueError):
    pass


class DomainError(EberleinError, ValueError):
    """A point lies outside the domain of the requested map."""


class FitFailure(EberleinError):
    """Samples are not the values of a bounded semicharacter."""

    def __init__(self, message, max_residual):
        super().__init__(f"{message} (max residual {max_residual:.3e})")
        self.max_residual = max_residual


class Underdetermined(EberleinError):
    pass


class InvalidSpine(EberleinError, ValueError):
    pass


class InvalidSpec(EberleinError, ValueError):
    pass


class UnsupportedFamily(EberleinError, ValueError):
    pass


class ResourceLimit(EberleinError):
    pass

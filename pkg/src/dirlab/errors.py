"""Exception hierarchy shared by the computational modules."""


class DirlabError(Exception):
    """Base class for all errors raised by dirlab."""


class DomainError(DirlabError, ValueError):
    """An argument lies outside the declared domain of a function."""


class SpecError(DirlabError, ValueError):
    """A textual or structural specification is malformed."""


class ResolutionError(DirlabError, ValueError):
    """A grid is too coarse (or too fine) for the requested computation."""


class QuadratureError(DirlabError, ArithmeticError):
    """Two independent numerical routes disagree beyond tolerance."""


class SearchError(DirlabError, ArithmeticError):
    """A supremum search found no admissible (finite) candidate."""

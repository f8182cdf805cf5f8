"""Exception types shared by the tentlab modules."""

from __future__ import annotations


class TentlabError(Exception):
    """Base class for all tentlab errors."""


class DomainError(TentlabError, ValueError):
    """An argument lies outside the domain of an operation (e.g. ``|z| >= 1``)."""


class ParameterDomainError(TentlabError, ValueError):
    """Parameters violate the hypotheses a check or certifier relies on."""


class DivergentIntegralError(TentlabError):
    """An integral that should be finite appears to diverge."""


class NonConvergenceError(TentlabError):
    """Adaptive quadrature or iteration did not reach its tolerance.

    The best available value and its error estimate are kept so callers can
    decide whether they are still usable.
    """

    def __init__(self, message: str, partial: float = float("nan"), error: float = float("inf")):
        super().__init__(message)
        self.partial = partial
        self.error = error


class CoveringError(TentlabError):
    """A lattice failed its covering verification."""

    def __init__(self, message: str, uncovered: complex):
        super().__init__(message)
        self.uncovered = uncovered


class WeightClassError(ParameterDomainError):
    """A certifier needs a doubling weight and the classifier did not confirm membership."""

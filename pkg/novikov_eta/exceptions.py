"""Exception hierarchy for novikov-eta.

Every failure the engine can diagnose is raised as a subclass of
``NovikovEtaError`` so that the CLI can turn it into a machine-readable report.
"""

from typing import Iterable, Optional


class NovikovEtaError(RuntimeError):
    """Base class for all errors raised by the package."""


class TruncationError(NovikovEtaError):
    """An internal degree above the configured MAX_U was requested."""

    def __init__(self, u: int, max_u: int):
        super().__init__(f"Internal degree {u} exceeds MAX_U={max_u}; raise max_u in the run config.")
        self.u = u
        self.max_u = max_u


class ContextError(NovikovEtaError):
    """Operands live in different generator contexts, or the context is unsupported."""


class NotTwoLocalError(NovikovEtaError, ValueError):
    """A rational number has an even denominator after reduction."""


class IntegralityError(NovikovEtaError):
    """A BP-side computation produced a coefficient outside Z_(2)."""


class FiltrationError(NovikovEtaError):
    """An element does not lie in the requested filtration."""


class BudgetError(NovikovEtaError):
    """A complex block is larger than the configured budget."""

    def __init__(self, context: str, degree, size: int, budget: int):
        super().__init__(
            f"Block {context} at {degree} has {size} basis elements, over the budget of {budget}. "
            "Shrink the region or raise block_budget."
        )
        self.context = context
        self.degree = degree
        self.size = size
        self.budget = budget


class RegionError(NovikovEtaError):
    """A result would land outside the computed region."""


class NotDefinedError(NovikovEtaError):
    """A Massey product was requested whose defining products do not vanish."""


class SearchError(NovikovEtaError):
    """A bounded search ran out of candidates."""


class CertificationError(NovikovEtaError):
    """A localized computation could not be certified on the requested region."""

    def __init__(self, message: str, uncertified: Optional[Iterable] = None):
        self.uncertified = sorted(uncertified or [])
        if self.uncertified:
            message = f"{message} Uncertified: {self.uncertified}"
        super().__init__(message)


class GradingError(NovikovEtaError, ValueError):
    """A degree violates the grading rules (for example odd u under tau extension)."""


class CocycleError(NovikovEtaError):
    """A representative that must be a cocycle is not."""


class CacheError(NovikovEtaError):
    """A cache record failed validation."""

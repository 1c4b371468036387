"""Exception hierarchy shared by every layer of the toolkit.

Everything user-facing derives from FoliaError so the CLI can map failures
onto its exit-code contract without guessing.
"""

from __future__ import annotations


class FoliaError(Exception):
    """Base class for all toolkit errors."""


# --- algebra ---------------------------------------------------------------

class UnknownVariable(FoliaError):
    pass


class DivisionByZero(FoliaError):
    pass


class NotDivisible(FoliaError):
    """Exact division failed; carries the nonzero remainder."""

    def __init__(self, remainder, message: str = "exact division left a remainder"):
        super().__init__(message)
        self.remainder = remainder


class AllZero(FoliaError):
    """gcd of an all-zero family is undefined."""


class MixedAlgebraics(FoliaError):
    """Two distinct algebraic values met in one point/slice; unsupported."""


# --- varieties / classification --------------------------------------------

class ResidualPresent(FoliaError):
    """An operation needed a residual-free variety decomposition."""


class PointNotInVariety(FoliaError):
    pass


class UndecidedParameter(FoliaError):
    """A parameter comparison could not be settled by the side conditions."""


class NotInvariant(FoliaError):
    pass


class InvalidFoliation(FoliaError):
    """Saturated field still vanishes on a hypersurface (gcd failure)."""


class NoCertifiedB(FoliaError):
    """compute_lp called with no certified strong membership in the ledger."""


# --- eta / numerics ---------------------------------------------------------

class DeclInvalid(FoliaError):
    """A product-structure declaration contradicts the model."""


class IntegratorDiverged(FoliaError):
    pass


# --- input language ---------------------------------------------------------

class LexError(FoliaError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class ParseError(FoliaError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class SemanticError(FoliaError):
    pass


# --- reports ----------------------------------------------------------------

class RecheckFailed(FoliaError):
    """A stored certificate failed independent re-verification."""

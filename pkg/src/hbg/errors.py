"""Structured errors raised at module boundaries.

Every error carries enough context to be rendered as a machine-readable
JSON object by the CLI (type name + message + optional detail dict).
"""

from __future__ import annotations

from typing import Any


class HbgError(Exception):
    """Base class for all structured errors in this package."""

    def __init__(self, message: str, **detail: Any) -> None:
        super().__init__(message)
        self.message = message
        self.detail = detail

    def to_json(self) -> dict[str, Any]:
        return {
            "type": type(self).__name__,
            "message": self.message,
            "detail": self.detail,
        }


class DimensionMismatchError(HbgError):
    """Operands have incompatible shapes; names both shapes."""


class InvalidGameError(HbgError):
    """A game matrix violates a structural precondition."""


class TrivialGameError(HbgError):
    """Signal: the game needs no quantum consideration (classical = unlimited)."""


class NotCanonicalizableError(HbgError):
    """A 3x2 game cannot be brought to the canonical sign pattern."""


class EnumerationCapError(HbgError):
    """An exact enumeration would exceed its hard size cap."""


class ExtractionError(HbgError):
    """Vector extraction failed to reproduce its Gram matrix."""


class InvalidConfigError(HbgError):
    """A round/sweep/search configuration violates an invariant."""


class CatalogError(HbgError):
    """A catalog is unusable for the requested aggregation."""

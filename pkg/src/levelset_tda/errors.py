"""Exception hierarchy shared by every pipeline stage."""

from __future__ import annotations


class LevelSetError(Exception):
    """Base class for all errors raised by this package."""


class InputError(LevelSetError, ValueError):
    """Malformed or out-of-range input (bad file, bad parameter)."""


class DomainError(LevelSetError, ValueError):
    """Well-formed input for which the computation is undefined."""


class EmptyManifoldError(DomainError):
    def __init__(self, detail: str | None = None) -> None:
        msg = "empty initial manifold"
        if detail:
            msg = f"{msg}: {detail}"
        super().__init__(msg)


class ContractViolation(LevelSetError, RuntimeError):
    """An internal structural contract does not hold (e.g. complex not closed under faces)."""

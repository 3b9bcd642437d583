"""
Coprime Toolkit Errors

Exception hierarchy shared by every module:
- CoprimeError carries the process exit code the CLI maps it to
- Domain failures (bad input, singular curve, invalid profile) exit 2
- Environment failures (unfactorable input, tampered files) exit 3
"""

from typing import Optional


EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_ENVIRONMENT = 3


class CoprimeError(Exception):
    """Base class for all toolkit errors."""

    exit_code: int = EXIT_USAGE


class DomainError(CoprimeError, ValueError):
    """An operation was called outside its precondition."""


class SingularCurve(DomainError):
    """The Weierstrass model has zero discriminant."""


class BadReduction(DomainError):
    """The curve has bad reduction at p (p divides the model discriminant)."""

    def __init__(self, p: int, label: Optional[str] = None):
        self.p = p
        self.label = label
        where = f" for {label}" if label else ""
        super().__init__(f"bad reduction at p={p}{where}")


class Unfactorable(CoprimeError):
    """Trial division plus a primality test could not finish the factorization."""

    exit_code = EXIT_ENVIRONMENT

    def __init__(self, n: int, cofactor: int):
        self.n = n
        self.cofactor = cofactor
        super().__init__(f"cannot factor {n}: cofactor {cofactor} left unresolved")


class NotSerreCurve(DomainError):
    """Squarefree discriminant part is +1 or -1, so the curve is never a Serre curve."""


class NotSerrePair(DomainError):
    """Two Serre curves with the same adelic level never form a Serre pair."""


class EnumerationTooLarge(DomainError):
    """A brute-force enumeration would exceed the configured guard."""


class UnknownCurve(DomainError):
    """A curve label is not present in the loaded catalog."""


class CatalogTampered(CoprimeError):
    """A catalog file is unreadable or a stored discriminant disagrees with the recomputed one."""

    exit_code = EXIT_ENVIRONMENT


class CheckpointError(CoprimeError):
    """A checkpoint file is unreadable, has a broken hash chain, or belongs to another run."""

    exit_code = EXIT_ENVIRONMENT


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the CLI exit code."""
    if isinstance(exc, CoprimeError):
        return exc.exit_code
    if isinstance(exc, ValueError):
        return EXIT_USAGE
    if isinstance(exc, OSError):
        return EXIT_ENVIRONMENT
    return EXIT_ENVIRONMENT

"""Exception hierarchy.

Validation failures (bad input) derive from :class:`ValidationError`; contract
failures discovered while running an operation derive from :class:`ContractError`.
The CLI maps the first family to exit code 2 and the second to exit code 1.
"""


class SockDivError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(SockDivError):
    """Input data does not describe a valid instance."""

    def __init__(self, message, *, field=None, line=None):
        super().__init__(message)
        self.field = field
        self.line = line

    def located(self, field=None, line=None):
        if field is not None and self.field is None:
            self.field = field
        if line is not None and self.line is None:
            self.line = line
        return self

    def __str__(self):
        msg = super().__str__()
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.field is not None:
            where.append(f"field {self.field!r}")
        return f"{msg} ({', '.join(where)})" if where else msg


class ParseError(ValidationError):
    pass


class NotABijection(ValidationError):
    pass


class ArityMismatch(ValidationError):
    pass


class SizeMismatch(ValidationError):
    pass


class FiberSizeError(ValidationError):
    pass


class FibersOverlap(ValidationError):
    pass


class DomainMismatch(ValidationError):
    pass


class ContractError(SockDivError):
    """An operation could not honour its contract."""


class IncompleteMatching(ContractError):
    """The proposal procedure stopped with unmatched elements."""

    def __init__(self, message, *, unmatched=(), instance=None):
        super().__init__(message)
        self.unmatched = tuple(unmatched)
        self.instance = instance


class OracleViolation(ContractError):
    pass


class SizeBoundExceeded(ContractError):
    pass


class BudgetExceeded(ContractError):
    pass


class NoEquivariantDivider(SockDivError):
    """Raised by the equivariant oracle when the search yields a certificate."""

    def __init__(self, certificate):
        super().__init__("no automorphism-invariant base bijection exists")
        self.certificate = certificate

from typing import Any, Optional


class PgxErrors:
    EXIT_OK = 0
    EXIT_PARSE = 2
    EXIT_VALIDATION = 3
    EXIT_RESOURCE = 4
    EXIT_STRUCTURAL = 5
    EXIT_INTERNAL = 70


class PgxError(Exception):
    error_code = PgxErrors.EXIT_INTERNAL

    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self._witness = witness

    @property
    def witness(self) -> Optional[Any]:
        return self._witness


class ParseError(PgxError):
    error_code = PgxErrors.EXIT_PARSE


class MalformedWordError(ParseError):
    pass


class ValidationError(PgxError):
    error_code = PgxErrors.EXIT_VALIDATION

    def __init__(self, message: str, witness: Optional[Any] = None, report: Optional[Any] = None):
        super().__init__(message, witness)
        self._report = report

    @property
    def report(self) -> Optional[Any]:
        return self._report


class UndefinedProductError(ValidationError):
    pass


class VerificationError(ValidationError):
    pass


class NotAGroupError(ValidationError):
    pass


class IncoherentSeedError(ValidationError):
    pass


class ResourceError(PgxError):
    error_code = PgxErrors.EXIT_RESOURCE


class StructuralError(PgxError):
    error_code = PgxErrors.EXIT_STRUCTURAL


class DomainError(StructuralError):
    pass


class ActionError(StructuralError):
    pass


class InternalError(PgxError):
    error_code = PgxErrors.EXIT_INTERNAL

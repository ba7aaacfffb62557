"""Exception types shared across the package."""


class RtcError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(RtcError):
    """Input text does not conform to the grammar."""

    def __init__(self, position: int, message: str):
        super().__init__(f"at offset {position}: {message}")
        self.position = position
        self.message = message


class UnknownSymbol(RtcError):
    pass


class ArityMismatch(RtcError):
    pass


class UnboundVariable(RtcError):
    pass


class SignatureMismatch(RtcError):
    pass


class NotAnRtcFormula(RtcError):
    pass


class BudgetExceeded(RtcError):
    pass


class NoCounterexample(RtcError):
    """The given model/valuation does not invalidate the conclusion."""


class NotApplicable(RtcError):
    """The requested rule or operation does not apply here."""


class SchemaMismatch(RtcError):
    """A rule instance does not fit its rule schema."""


class FreshnessViolation(RtcError):
    def __init__(self, var: str, detail: str = ""):
        super().__init__(f"variable {var!r} is not fresh{': ' + detail if detail else ''}")
        self.var = var


class UnknownTheoryAxiom(RtcError):
    pass


class MissingPairSymbol(RtcError):
    pass


class VariableClash(RtcError):
    pass

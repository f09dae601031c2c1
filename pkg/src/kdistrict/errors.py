"""Exception hierarchy shared by every module.

`DomainError` subclasses map to CLI exit code 1, `UsageError` to exit code 2.
"""


class DomainError(Exception):
    code = "DomainError"


class UsageError(Exception):
    code = "UsageError"


class ParseError(DomainError):
    code = "ParseError"


class InvalidEdge(DomainError):
    code = "InvalidEdge"


class NotConnected(DomainError):
    code = "NotConnected"


class NotBiconnected(DomainError):
    code = "NotBiconnected"


class Biconnected(DomainError):
    code = "Biconnected"


class InvalidMap(DomainError):
    code = "InvalidMap"


class InvalidSwitch(DomainError):
    code = "InvalidSwitch"

    def __init__(self, reason, step=None):
        self.reason = reason
        self.step = step
        super().__init__(f"{reason} at {step}" if step is not None else reason)


class IncontractibleDistrict(DomainError):
    code = "IncontractibleDistrict"


class InvalidTarget(DomainError):
    code = "InvalidTarget"


class IncontractibleInput(DomainError):
    code = "IncontractibleInput"


class PreconditionViolated(DomainError):
    code = "PreconditionViolated"


class NotPseudoCanonical(DomainError):
    code = "NotPseudoCanonical"


class MismatchedK(UsageError):
    code = "MismatchedK"


class KOutOfRange(UsageError):
    code = "KOutOfRange"


class TooLarge(DomainError):
    code = "TooLarge"


class UnknownSignature(DomainError):
    code = "UnknownSignature"


class BadParams(UsageError):
    code = "BadParams"


class BadFormula(DomainError):
    code = "BadFormula"


class NotSatisfying(DomainError):
    code = "NotSatisfying"


class WrongKind(DomainError):
    code = "WrongKind"


class InvalidPlan(DomainError):
    code = "InvalidPlan"

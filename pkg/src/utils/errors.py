class PadicHeightError(Exception):
    """Base class for every mathematical or data error raised by the package"""
    code = "PadicHeightError"

    def __init__(self, message=""):
        super().__init__(message)
        self.message = message

    def __str__(self):
        return f"{self.code}: {self.message}" if self.message else self.code


class ModulusMismatch(PadicHeightError):
    code = "ModulusMismatch"


class NotAUnit(PadicHeightError):
    code = "NotAUnit"


class NotIntegrable(PadicHeightError):
    """A series coefficient is not divisible enough to be integrated"""
    code = "NotIntegrable"

    def __init__(self, index, message=""):
        super().__init__(message or f"coefficient of t^{index} fails the divisibility check")
        self.index = index

    def __reduce__(self):
        return (type(self), (self.index, self.message))


class BadReduction(PadicHeightError):
    code = "BadReduction"


class FactorizationTooHard(PadicHeightError):
    code = "FactorizationTooHard"


class SingularReduction(PadicHeightError):
    code = "SingularReduction"


class DegenerateColumn(PadicHeightError):
    code = "DegenerateColumn"


class PrecisionExhausted(PadicHeightError):
    """Working precision ran out (an exact division by p failed)"""
    code = "PrecisionExhausted"


class FrobeniusCheckFailed(PadicHeightError):
    code = "FrobeniusCheckFailed"


class PreconditionViolated(PadicHeightError):
    code = "PreconditionViolated"


class EvenModulus(PadicHeightError):
    code = "EvenModulus"


class TorsionCollapse(PadicHeightError):
    code = "TorsionCollapse"


class NotGoodOrdinary(PadicHeightError):
    code = "NotGoodOrdinary"


class TorsionPoint(PadicHeightError):
    code = "TorsionPoint"


class A1Violated(PadicHeightError):
    code = "A1Violated"


class A2Violated(PadicHeightError):
    code = "A2Violated"


class ConfigError(PadicHeightError):
    code = "ConfigError"


class FixtureError(PadicHeightError):
    code = "FixtureError"

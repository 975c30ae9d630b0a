"""Exception hierarchy shared by every module of the package."""


class AlgebroidKitError(Exception):
    """Base class for all errors raised by algebroid_kit."""


class ExpressionSyntaxError(AlgebroidKitError, ValueError):
    def __init__(self, text, position, expected):
        self.text = text
        self.position = position
        self.expected = expected
        super().__init__(f"syntax error at position {position}: expected {expected} in {text!r}")


class UnknownVariable(AlgebroidKitError, ValueError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown variable {name!r}")


class NonConstantDivisor(AlgebroidKitError, ValueError):
    pass


class RingMismatch(AlgebroidKitError, ValueError):
    pass


class NotDivisible(AlgebroidKitError, ArithmeticError):
    def __init__(self, dividend, divisor, remainder):
        self.dividend = dividend
        self.divisor = divisor
        self.remainder = remainder
        super().__init__(f"{dividend} is not divisible by {divisor} (remainder {remainder})")


class DivisionByZero(AlgebroidKitError, ZeroDivisionError):
    pass


class NotAComplex(AlgebroidKitError, ValueError):
    pass


class RankMismatch(AlgebroidKitError, ValueError):
    pass


class AlgebroidMismatch(AlgebroidKitError, ValueError):
    pass


class DuplicateVariable(AlgebroidKitError, ValueError):
    pass


class NotPoisson(AlgebroidKitError, ValueError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"[pi, pi] does not vanish; offending coefficient {witness}")


class DegreeError(AlgebroidKitError, ValueError):
    pass


class NotHomogeneous(AlgebroidKitError, ValueError):
    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class WeightUnbounded(AlgebroidKitError, ValueError):
    pass


class NonFlat(AlgebroidKitError, ValueError):
    """A flat connection was required but the curvature does not vanish."""


class NotInjective(AlgebroidKitError, ValueError):
    pass


class Obstructed(AlgebroidKitError, ArithmeticError):
    def __init__(self, determinant, numerator, generator):
        self.determinant = determinant
        self.numerator = numerator
        self.generator = generator
        super().__init__(
            f"induced connection is not polynomial: {numerator} is not divisible by {determinant} "
            f"(generator {generator})")


class SignCalibrationFailure(AlgebroidKitError, RuntimeError):
    pass


class MorphismInvalid(AlgebroidKitError, ValueError):
    pass


class UnknownFixture(AlgebroidKitError, KeyError):
    def __str__(self):
        return f"unknown fixture {self.args[0]!r}"


class SpecParseError(AlgebroidKitError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class SemanticError(AlgebroidKitError, ValueError):
    pass


# names used by the complex and connection layers
NonFlatCoefficients = NonFlat
NonFlatInput = NonFlat

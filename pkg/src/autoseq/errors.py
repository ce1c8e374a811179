"""Exception hierarchy shared by all analysis modules."""


class AutoseqError(Exception):
    """Base class for every error raised by this package."""


class InputError(AutoseqError, ValueError):
    """The caller supplied an object that violates a precondition."""


class InternalLimit(AutoseqError):
    """A documented resource or degree limit was hit."""


class SpecParseError(InputError):
    pass


class NotProlongable(InputError):
    pass


class InsufficientOccurrences(InputError):
    pass


class NilpotentMatrix(InputError):
    pass


class NotPrimitive(InputError):
    pass


class SingularMatrix(InputError):
    pass


class NotUniform(InputError):
    pass


class HorizonTooSmall(InputError):
    pass


class BlockAlphabetUnstable(InputError):
    pass


class TooFewOccurrences(InputError):
    pass


class FrequencyNotSmall(InputError):
    pass


class HypothesisViolated(InputError):
    pass


class HeightNotOne(InputError):
    pass


class PrefixTooShort(InputError):
    pass


class UnknownGenerator(InputError):
    pass


class ParameterInvalid(InputError):
    pass


class NotIntegerValued(ParameterInvalid):
    pass


class UnknownTheoremTag(AutoseqError):
    pass


class DegreeLimitExceeded(InternalLimit):
    pass


class SieveLimitExceeded(InternalLimit):
    pass

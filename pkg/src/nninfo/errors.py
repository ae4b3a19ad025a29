"""Exception hierarchy.

Every error carries a stable machine-readable ``code`` that the command line
front end reports on failure.
"""


class NNInfoError(Exception):
    code = "ERROR"


class InvalidArgument(NNInfoError, ValueError):
    code = "INVALID_ARGUMENT"


class NotPositiveDefinite(NNInfoError, ValueError):
    code = "NOT_POSITIVE_DEFINITE"


class ResidualTooLarge(NNInfoError, ValueError):
    code = "RESIDUAL_TOO_LARGE"


class DomainError(NNInfoError, ValueError):
    code = "DOMAIN_ERROR"


class ZeroInputRow(NNInfoError, ValueError):
    code = "ZERO_INPUT_ROW"


class BadMagic(NNInfoError, ValueError):
    code = "BAD_MAGIC"


class TruncatedFile(NNInfoError, ValueError):
    code = "TRUNCATED_FILE"


class LabelOutOfRange(NNInfoError, ValueError):
    code = "LABEL_OUT_OF_RANGE"


class InsufficientData(NNInfoError, ValueError):
    code = "INSUFFICIENT_DATA"
